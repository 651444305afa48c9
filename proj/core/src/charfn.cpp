#include "stieltjes/charfn.hpp"

#include <cmath>
#include <string>

#include "stieltjes/parallel.hpp"

namespace stieltjes {

namespace {

const Complex I(0.0, 1.0);

double sign_of(int xi) { return xi == 1 ? -1.0 : 1.0; }

double cancellation_scale(const Eigen::Matrix3cd& n) {
  return std::max(1.0, std::abs(n(0, 0) * n(1, 1)) + std::abs(n(1, 0) * n(0, 1)));
}

Complex y1_end(const Measure& p, const Measure& q, Complex lambda, const SolverConfig& cfg) {
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(3, 1);
  e(0, 0) = 1.0;
  return end_states(p, q, lambda, e, cfg)(0, 0);
}

}  // namespace

void check_xi(int xi) {
  if (xi != 1 && xi != 2) throw DomainError("boundary condition index must be 1 or 2, got " + std::to_string(xi));
}

BoundaryMatrix boundary_matrix(const Measure& p, const Measure& q, Complex lambda, int xi,
                               const SolverConfig& cfg) {
  check_xi(xi);
  auto n = fundamental_matrix(p, q, lambda, 1.0, cfg).m;
  BoundaryMatrix b;
  b.xi = xi;
  b.lambda = lambda;
  b.entries << n(0, 0), n(0, 1), n(1, 0), n(1, 1) + sign_of(xi);
  return b;
}

CharValue delta(const Measure& p, const Measure& q, Complex lambda, int xi, const SolverConfig& cfg) {
  check_xi(xi);
  auto n = fundamental_matrix(p, q, lambda, 1.0, cfg).m;
  Eigen::Matrix2cd m;
  m << n(0, 0), n(0, 1), n(1, 0), n(1, 1) + sign_of(xi);
  Complex y1 = n(0, 0);
  // the real lambda case needs no second solve
  Complex y1_conj = lambda.imag() == 0.0 ? std::conj(y1) : std::conj(y1_end(p, q, std::conj(lambda), cfg));

  CharValue out;
  out.lambda = lambda;
  out.xi = xi;
  out.value = y1_conj + sign_of(xi) * y1;
  out.det_value = m.determinant();
  out.Y1 = 0.5 * (y1 + y1_conj);
  out.Z1 = (y1 - y1_conj) / (2.0 * I);
  out.mismatch = std::abs(out.value - out.det_value) / cancellation_scale(n);
  if (!(out.mismatch <= kCharCrossCheckTol))
    throw ConsistencyError("characteristic function cross-check failed: relative mismatch " +
                           std::to_string(out.mismatch));
  return out;
}

Complex delta_value(const Measure& p, const Measure& q, Complex lambda, int xi, const SolverConfig& cfg) {
  check_xi(xi);
  Complex y1 = y1_end(p, q, lambda, cfg);
  Complex y1_conj = lambda.imag() == 0.0 ? std::conj(y1) : std::conj(y1_end(p, q, std::conj(lambda), cfg));
  return y1_conj + sign_of(xi) * y1;
}

RealSplit real_split(const Measure& p, const Measure& q, double lambda, const SolverConfig& cfg) {
  auto n = fundamental_matrix(p, q, lambda, 1.0, cfg).m;
  Eigen::Matrix2cd m1, m2;
  m1 << n(0, 0), n(0, 1), n(1, 0), n(1, 1) - 1.0;
  m2 << n(0, 0), n(0, 1), n(1, 0), n(1, 1) + 1.0;
  RealSplit r;
  r.Y1 = n(0, 0).real();
  r.Z1 = n(0, 0).imag();
  double scale = cancellation_scale(n);
  r.imag_residue = std::max(std::abs(m1.determinant().real()), std::abs(m2.determinant().imag())) / scale;
  return r;
}

std::vector<CharScanRow> char_scan(const Measure& p, const Measure& q, const std::vector<double>& lambdas,
                                   const SolverConfig& cfg) {
  std::vector<CharScanRow> rows(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    double lam = lambdas[i];
    Complex y1 = y1_end(p, q, lam, cfg);
    CharScanRow& r = rows[i];
    r.lambda = lam;
    r.k = std::cbrt(lam);
    r.Y1 = y1.real();
    r.Z1 = y1.imag();
    r.delta1 = std::conj(y1) - y1;
    r.delta2 = std::conj(y1) + y1;
  });
  return rows;
}

}  // namespace stieltjes
