#include "stieltjes/sens.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stieltjes/parallel.hpp"
#include "stieltjes/quadrature.hpp"

namespace stieltjes {

namespace {

const Complex I(0.0, 1.0);

SensitivityField make_field(const Eigenpair& eig, Direction kind) {
  if (eig.g_mult != 1)
    throw UnsupportedMultiplicityError("eigenvalue derivative needs a simple eigenvalue (g-multiplicity 2 found)");
  if (eig.E.nodes.empty()) throw DomainError("eigenpair carries no eigenfunction");
  SensitivityField f;
  f.kind = kind;
  f.xi = eig.xi;
  f.n = eig.n;
  f.lambda = eig.lambda;
  f.E = eig.E;
  f.x.reserve(eig.E.nodes.size());
  f.values.reserve(eig.E.nodes.size());
  for (const auto& nd : eig.E.nodes) {
    f.x.push_back(nd.x);
    if (kind == Direction::P) {
      f.values.push_back(std::norm(nd.y));
    } else {
      Complex br = I * (std::conj(nd.y) * nd.yp - nd.y * std::conj(nd.yp));
      f.imag_residue = std::max(f.imag_residue, std::abs(br.imag()));
      f.values.push_back(br.real());
    }
  }
  return f;
}

}  // namespace

double SensitivityField::at(double t) const {
  Eigen::Vector3cd s = E.state(t);
  if (kind == Direction::P) return std::norm(s(0));
  return -2.0 * (std::conj(s(0)) * s(1)).imag();
}

double SensitivityField::pair(const Measure& nu) const {
  std::vector<double> cuts = E.edges();
  auto nb = nu.breakpoints();
  cuts.insert(cuts.end(), nb.begin(), nb.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const GaussRule& r = gauss_legendre(20);
  double s = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    double a = cuts[c], h = cuts[c + 1] - a;
    if (h <= 0.0) continue;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      double t = a + h * r.nodes[i];
      double weight = kind == Direction::P ? nu.density_at(t) : nu.eval(t);
      if (weight != 0.0) s += h * r.weights[i] * at(t) * weight;
    }
  }
  if (kind == Direction::P)
    for (const auto& at_ : nu.atoms()) s += at_.w * at(at_.x);
  return s;
}

SensitivityField dlambda_dp(const Eigenpair& eig) { return make_field(eig, Direction::P); }
SensitivityField dlambda_dq(const Eigenpair& eig) { return make_field(eig, Direction::Q); }

namespace {

Eigen::Matrix3cd dN(const Measure& p, const Measure& q, Complex lambda, double x, const Measure& nu, Direction dir,
                    const SolverConfig& cfg) {
  if (!(x > 0.0 && x <= 1.0)) throw DomainError("dN: x must lie in (0,1]");
  if (nu.is_zero()) return Eigen::Matrix3cd::Zero();
  SolverConfig c2 = cfg;
  auto nb = nu.breakpoints();
  c2.extra_breakpoints.insert(c2.extra_breakpoints.end(), nb.begin(), nb.end());
  c2.extra_breakpoints.push_back(x);
  FundamentalPath fp = fundamental_path(p, q, lambda, c2);

  Eigen::Matrix3cd k = Eigen::Matrix3cd::Zero();
  std::size_t at_x = 0;
  for (std::size_t i = 0; i < fp.x.size() && fp.x[i] <= x; ++i) {
    const double t = fp.x[i];
    const bool edge = fp.weight[i] == 0.0;
    const Eigen::Matrix3cd& n = fp.n[i];
    // third column of N^{-1}; rows 0 and 1 of N are continuous across atoms
    Eigen::Vector3cd c3 = adjugate(n).col(2);
    double dnu = edge ? nu.atom_at(t) : fp.weight[i] * nu.density_at(t);
    if (dnu != 0.0) {
      if (dir == Direction::P)
        k += (I * dnu) * c3 * n.row(0);
      else
        k -= dnu * c3 * n.row(0);
    }
    if (dir == Direction::Q && !edge) {
      double v = nu.eval(t);
      if (v != 0.0) k -= (2.0 * v * fp.weight[i]) * c3 * n.row(1);
    }
    if (edge) at_x = i;
  }
  return fp.n[at_x] * k;
}

}  // namespace

Eigen::Matrix3cd dN_dp(const Measure& p, const Measure& q, Complex lambda, double x, const Measure& nu,
                       const SolverConfig& cfg) {
  return dN(p, q, lambda, x, nu, Direction::P, cfg);
}

Eigen::Matrix3cd dN_dq(const Measure& p, const Measure& q, Complex lambda, double x, const Measure& nu,
                       const SolverConfig& cfg) {
  return dN(p, q, lambda, x, nu, Direction::Q, cfg);
}

double dN_fd_error(const Measure& p, const Measure& q, Complex lambda, double x, const Measure& nu, Direction dir,
                   double eps, const SolverConfig& cfg) {
  Eigen::Matrix3cd formula = dN(p, q, lambda, x, nu, dir, cfg);
  Measure up = eps * nu, dn = (-eps) * nu;
  Eigen::Matrix3cd plus, minus;
  if (dir == Direction::P) {
    plus = fundamental_matrix(p + up, q, lambda, x, cfg).m;
    minus = fundamental_matrix(p + dn, q, lambda, x, cfg).m;
  } else {
    plus = fundamental_matrix(p, q + up, lambda, x, cfg).m;
    minus = fundamental_matrix(p, q + dn, lambda, x, cfg).m;
  }
  Eigen::Matrix3cd fd = (plus - minus) / (2.0 * eps);
  double err = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      err = std::max(err, std::abs(fd(i, j) - formula(i, j)) / std::max(1.0, std::abs(formula(i, j))));
  return err;
}

double track_eigenvalue(const Measure& p, const Measure& q, int xi, double lambda0, double expected_shift,
                        const SpectrumConfig& cfg) {
  check_xi(xi);
  const double k0 = std::cbrt(lambda0);
  const double klo = k0 - cfg.disc_radius, khi = k0 + cfg.disc_radius;
  auto f = [&](double lam) {
    Complex d = delta_value(p, q, lam, xi, cfg.solver);
    return xi == 1 ? d.imag() : d.real();
  };
  double c = lambda0 + expected_shift;
  double w = std::max(1e-10 * std::max(1.0, std::abs(lambda0)), 0.25 * std::abs(expected_shift));
  for (int it = 0; it < 60; ++it, w *= 4.0) {
    double lo = std::cbrt(c - w), hi = std::cbrt(c + w);
    bool clipped = false;
    if (lo < klo) lo = klo, clipped = true;
    if (hi > khi) hi = khi, clipped = true;
    double flo = f(lo * lo * lo), fhi = f(hi * hi * hi);
    if (flo == 0.0) return lo * lo * lo;
    if (fhi == 0.0) return hi * hi * hi;
    if ((flo < 0) != (fhi < 0)) {
      double k = refine_root(p, q, xi, lo, hi, cfg);
      return k * k * k;
    }
    if (clipped && lo == klo && hi == khi) break;
  }
  throw TrackingError("eigenvalue left the k-disc around " + std::to_string(k0) + " under perturbation");
}

FdTable fd_check(const Measure& p, const Measure& q, const Eigenpair& eig, const Measure& nu, Direction dir,
                 const std::vector<double>& eps_list, const SpectrumConfig& cfg) {
  if (eps_list.empty()) throw DomainError("fd_check: empty step list");
  SensitivityField field = dir == Direction::P ? dlambda_dp(eig) : dlambda_dq(eig);
  FdTable t;
  t.xi = eig.xi;
  t.n = eig.n;
  t.direction = dir;
  t.lambda = eig.lambda;
  t.formula = field.pair(nu);
  t.rows.resize(eps_list.size());
  SpectrumConfig quiet = cfg;
  quiet.eigenfunctions = false;
  quiet.check_simplicity = false;
  parallel_for(eps_list.size(), [&](std::size_t i) {
    double eps = eps_list[i];
    if (!(eps > 0.0)) throw DomainError("fd_check: steps must be positive");
    Measure up = eps * nu, dn = (-eps) * nu;
    double lp, lm;
    if (dir == Direction::P) {
      lp = track_eigenvalue(p + up, q, eig.xi, eig.lambda, eps * t.formula, quiet);
      lm = track_eigenvalue(p + dn, q, eig.xi, eig.lambda, -eps * t.formula, quiet);
    } else {
      lp = track_eigenvalue(p, q + up, eig.xi, eig.lambda, eps * t.formula, quiet);
      lm = track_eigenvalue(p, q + dn, eig.xi, eig.lambda, -eps * t.formula, quiet);
    }
    FdRow& r = t.rows[i];
    r.eps = eps;
    r.fd = (lp - lm) / (2.0 * eps);
    r.formula = t.formula;
    r.abs_err = std::abs(r.fd - t.formula);
  });
  auto big = std::max_element(t.rows.begin(), t.rows.end(), [](const FdRow& a, const FdRow& b) { return a.eps < b.eps; });
  auto small = std::min_element(t.rows.begin(), t.rows.end(), [](const FdRow& a, const FdRow& b) { return a.eps < b.eps; });
  double floor = 1e-8 * std::max(1.0, std::abs(t.formula));
  t.decreasing = small->abs_err <= std::max(big->abs_err, floor);
  return t;
}

FdTable fd_check(const Measure& p, const Measure& q, int xi, int n, const Measure& nu, Direction dir,
                 const std::vector<double>& eps_list, const SpectrumConfig& cfg) {
  SpectrumConfig c = cfg;
  c.eigenfunctions = true;
  Eigenpair eig = find_eigenvalue(p, q, xi, n, c);
  return fd_check(p, q, eig, nu, dir, eps_list, cfg);
}

std::string field_csv_rows(const SensitivityField& f) {
  std::string out;
  char buf[96];
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.x[i], f.values[i]);
    out += buf;
  }
  return out;
}

std::string fd_csv_rows(const FdTable& t) {
  std::string out;
  char buf[160];
  for (const auto& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%.3e,%.17g,%.17g,%.6e\n", r.eps, r.fd, r.formula, r.abs_err);
    out += buf;
  }
  return out;
}

}  // namespace stieltjes
