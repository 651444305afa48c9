#pragma once

#include <string>
#include <vector>

#include "stieltjes/spectrum.hpp"

namespace stieltjes {

enum class Direction { P, Q };

// Real field on the eigenfunction mesh. Kind P: |E|^2, paired against d nu.
// Kind Q: i[E, conj E] = -2 Im(conj(E) E'), paired against nu(x) dx.
struct SensitivityField {
  Direction kind = Direction::P;
  int xi = 1;
  int n = 0;
  double lambda = 0.0;
  std::vector<double> x;
  std::vector<double> values;
  double imag_residue = 0.0;  // max |Im| of the complex bracket before taking the real part
  SolutionPath E;             // source of the interpolant

  double at(double t) const;
  // Directional derivative of lambda along nu.
  double pair(const Measure& nu) const;
};

SensitivityField dlambda_dp(const Eigenpair& eig);
SensitivityField dlambda_dq(const Eigenpair& eig);

// Derivative of N(x) along p + eps nu_p (resp. q + eps nu_q) at eps = 0.
Eigen::Matrix3cd dN_dp(const Measure& p, const Measure& q, Complex lambda, double x, const Measure& nu,
                       const SolverConfig& cfg = {});
Eigen::Matrix3cd dN_dq(const Measure& p, const Measure& q, Complex lambda, double x, const Measure& nu,
                       const SolverConfig& cfg = {});

// Max entrywise |centered FD - formula| / max(1, |formula_ij|).
double dN_fd_error(const Measure& p, const Measure& q, Complex lambda, double x, const Measure& nu, Direction dir,
                   double eps, const SolverConfig& cfg = {});

// Root of the perturbed problem continuing from lambda0 inside the k-disc of
// radius cfg.disc_radius around cbrt(lambda0). Throws TrackingError.
double track_eigenvalue(const Measure& p, const Measure& q, int xi, double lambda0, double expected_shift,
                        const SpectrumConfig& cfg = {});

struct FdRow {
  double eps = 0.0;
  double fd = 0.0;
  double formula = 0.0;
  double abs_err = 0.0;
};

struct FdTable {
  int xi = 1;
  int n = 0;
  Direction direction = Direction::P;
  double lambda = 0.0;
  double formula = 0.0;
  std::vector<FdRow> rows;  // in the order of the eps list
  // error at the smallest eps does not exceed the error at the largest,
  // allowing a noise floor of 1e-8 * max(1, |formula|)
  bool decreasing = false;
};

FdTable fd_check(const Measure& p, const Measure& q, int xi, int n, const Measure& nu, Direction dir,
                 const std::vector<double>& eps_list, const SpectrumConfig& cfg = {});
// Same with a precomputed simple eigenpair (eigenfunction required).
FdTable fd_check(const Measure& p, const Measure& q, const Eigenpair& eig, const Measure& nu, Direction dir,
                 const std::vector<double>& eps_list, const SpectrumConfig& cfg = {});

// CSV rows (no header).
std::string field_csv_rows(const SensitivityField& f);        // x,value
std::string fd_csv_rows(const FdTable& t);                    // eps,fd,formula,abs_err

}  // namespace stieltjes
