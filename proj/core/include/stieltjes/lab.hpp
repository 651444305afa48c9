#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "stieltjes/sens.hpp"

namespace stieltjes {

struct ConvergenceReport {
  std::vector<double> params;
  std::vector<double> values;
  double reference = 0.0;
  std::vector<double> errors;
  std::vector<std::string> failures;  // per-parameter error text, empty when fine
  // errors non-increasing from the first third of the sequence on
  bool verdict = false;
};

bool monotone_after_first_third(const std::vector<double>& errors);

using MeasureBuilder = std::function<Measure(int)>;

// lambda_{xi,n} along a sequence built from m, against the limit measure.
// Direction::P varies p with q fixed; Direction::Q varies q with p fixed.
ConvergenceReport weakstar_eig(const MeasureBuilder& build, const std::vector<int>& ms, const Measure& limit,
                               const Measure& fixed, int xi, int n, Direction dir,
                               const SpectrumConfig& cfg = {});

struct ContinuityReport {
  std::vector<double> deltas;  // sup|dp| + sup|dq| per perturbation
  std::vector<double> sup_y, sup_yp, sup_w;
  // sups shrink (non-increasing) as delta decreases
  bool verdict = false;
};

struct Perturbation {
  Measure dp, dq;
};

// Sup over the three canonical solutions, 201 uniform points plus
// breakpoints, and lambda in U.
ContinuityReport solution_continuity(const Measure& p0, const Measure& q0, const std::vector<Perturbation>& perts,
                                     const std::vector<Complex>& lambdas, const SolverConfig& cfg = {});

// |w(x) - w_limit(x)| for the solution with initial triple init.
double w_gap(const Measure& p, const Measure& p_limit, const Measure& q, Complex lambda, const InitialTriple& init,
             double x, const SolverConfig& cfg = {});

struct BoundSample {
  double x = 0.0;
  Complex lambda;
};

struct BoundViolation {
  double x = 0.0;
  Complex lambda;
  int j = 1;
  bool difference = false;  // bound on y_j(p,q) - y_j(0,0)
  double lhs = 0.0, rhs = 0.0;
};

struct BoundAuditReport {
  int checks = 0;
  double max_ratio = 0.0;  // max lhs / rhs
  std::vector<BoundViolation> violations;
};

// |y_j| <= 3|k|^{1-j} Xi e^{3(2||q|| + p(x) + q(x))} and the same for
// |y_j - y_j^0| with |k|^{-j}, where p(x), q(x) are variations on [0,x].
BoundAuditReport bound_audit(const Measure& p, const Measure& q, const std::vector<BoundSample>& samples,
                             const SolverConfig& cfg = {});

struct ResidualReport {
  int xi = 1;
  std::vector<int> ns;
  std::vector<double> lambdas, leading, residuals;
  double q_integral = 0.0;
  double lower_max = 0.0, upper_max = 0.0;
  bool verdict = false;  // upper_max <= 2 lower_max
};

// Largest |k| accepted by asymptotic_residuals.
inline constexpr double kResidualKCeiling = 40.0 * 3.141592653589793;

ResidualReport asymptotic_residuals(const Measure& p, const Measure& q, int xi, int n_min, int n_max,
                                    const SpectrumConfig& cfg = {});

std::string convergence_csv_rows(const ConvergenceReport& r);  // param,value,reference,error
std::string continuity_csv_rows(const ContinuityReport& r);    // delta,sup_y,sup_yp,sup_w
std::string bound_csv_rows(const BoundAuditReport& r);         // x,re_lambda,im_lambda,j,kind,lhs,rhs
std::string residual_csv_rows(const ResidualReport& r);        // xi,n,lambda,leading,residual

}  // namespace stieltjes
