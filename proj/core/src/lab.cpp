#include "stieltjes/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "stieltjes/parallel.hpp"

namespace stieltjes {

bool monotone_after_first_third(const std::vector<double>& errors) {
  if (errors.empty()) return false;
  double scale = 0.0;
  for (double e : errors) {
    if (!std::isfinite(e)) return false;
    scale = std::max(scale, e);
  }
  // rounding-level wiggle once converged is not a trend reversal
  const double slack = 1e-13 * std::max(1.0, scale);
  for (std::size_t i = errors.size() / 3; i + 1 < errors.size(); ++i)
    if (errors[i + 1] > errors[i] + slack) return false;
  return true;
}

ConvergenceReport weakstar_eig(const MeasureBuilder& build, const std::vector<int>& ms, const Measure& limit,
                               const Measure& fixed, int xi, int n, Direction dir, const SpectrumConfig& cfg) {
  check_xi(xi);
  if (ms.empty()) throw DomainError("weakstar_eig: empty parameter list");
  SpectrumConfig lim_cfg = cfg;
  lim_cfg.eigenfunctions = false;
  lim_cfg.check_simplicity = true;
  Eigenpair ref = dir == Direction::P ? find_eigenvalue(limit, fixed, xi, n, lim_cfg)
                                      : find_eigenvalue(fixed, limit, xi, n, lim_cfg);
  if (ref.g_mult != 1 || !ref.a_simple)
    throw UnsupportedMultiplicityError("weakstar_eig: eigenvalue at the limit measure is not simple");

  ConvergenceReport r;
  r.reference = ref.lambda;
  r.params.assign(ms.begin(), ms.end());
  r.values.assign(ms.size(), std::numeric_limits<double>::quiet_NaN());
  r.errors.assign(ms.size(), std::numeric_limits<double>::quiet_NaN());
  r.failures.assign(ms.size(), {});
  SpectrumConfig quiet = cfg;
  quiet.eigenfunctions = false;
  quiet.check_simplicity = false;
  parallel_for(ms.size(), [&](std::size_t i) {
    try {
      Measure mm = build(ms[i]);
      Eigenpair e = dir == Direction::P ? find_eigenvalue(mm, fixed, xi, n, quiet)
                                        : find_eigenvalue(fixed, mm, xi, n, quiet);
      r.values[i] = e.lambda;
      r.errors[i] = std::abs(e.lambda - r.reference);
    } catch (const std::exception& ex) {
      r.failures[i] = ex.what();
    }
  });
  r.verdict = monotone_after_first_third(r.errors);
  return r;
}

namespace {

std::vector<double> continuity_mesh(std::initializer_list<const Measure*> ms) {
  std::vector<double> xs;
  for (int i = 0; i <= 200; ++i) xs.push_back(i / 200.0);
  for (const Measure* m : ms) {
    auto b = m->breakpoints();
    xs.insert(xs.end(), b.begin(), b.end());
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace

ContinuityReport solution_continuity(const Measure& p0, const Measure& q0, const std::vector<Perturbation>& perts,
                                     const std::vector<Complex>& lambdas, const SolverConfig& cfg) {
  ContinuityReport r;
  const std::size_t np = perts.size();
  r.deltas.resize(np);
  r.sup_y.assign(np, 0.0);
  r.sup_yp.assign(np, 0.0);
  r.sup_w.assign(np, 0.0);
  parallel_for(np, [&](std::size_t i) {
    const Perturbation& d = perts[i];
    r.deltas[i] = d.dp.sup_norm() + d.dq.sup_norm();
    if (d.dp.is_zero() && d.dq.is_zero()) return;
    Measure p = p0 + d.dp, q = q0 + d.dq;
    std::vector<double> xs = continuity_mesh({&p0, &q0, &p, &q});
    for (Complex lam : lambdas) {
      auto a = fundamental_matrices(p0, q0, lam, xs, cfg);
      auto b = fundamental_matrices(p, q, lam, xs, cfg);
      for (std::size_t s = 0; s < xs.size(); ++s)
        for (int c = 0; c < 3; ++c) {
          r.sup_y[i] = std::max(r.sup_y[i], std::abs(b[s].m(0, c) - a[s].m(0, c)));
          r.sup_yp[i] = std::max(r.sup_yp[i], std::abs(b[s].m(1, c) - a[s].m(1, c)));
          r.sup_w[i] = std::max(r.sup_w[i], std::abs(b[s].m(2, c) - a[s].m(2, c)));
        }
    }
  });
  std::vector<std::size_t> order(np);
  for (std::size_t i = 0; i < np; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return r.deltas[a] > r.deltas[b]; });
  r.verdict = np > 0;
  for (std::size_t k = 0; k + 1 < np; ++k) {
    std::size_t a = order[k], b = order[k + 1];
    if (r.sup_y[b] > r.sup_y[a] || r.sup_yp[b] > r.sup_yp[a] || r.sup_w[b] > r.sup_w[a]) r.verdict = false;
  }
  return r;
}

double w_gap(const Measure& p, const Measure& p_limit, const Measure& q, Complex lambda, const InitialTriple& init,
             double x, const SolverConfig& cfg) {
  Eigen::Vector3cd a = fundamental_matrix(p, q, lambda, x, cfg).m * init.vec();
  Eigen::Vector3cd b = fundamental_matrix(p_limit, q, lambda, x, cfg).m * init.vec();
  return std::abs(a(2) - b(2));
}

BoundAuditReport bound_audit(const Measure& p, const Measure& q, const std::vector<BoundSample>& samples,
                             const SolverConfig& cfg) {
  for (const auto& s : samples) {
    if (!(s.x >= 0.0 && s.x <= 1.0)) throw DomainError("bound_audit: x outside [0,1]");
    if (std::abs(cube_root(s.lambda)) < 1.0) throw DomainError("bound_audit: needs |k| >= 1");
  }
  const double qv = norm_v(q);
  const Measure pv = tv_function(p), qf = tv_function(q);
  const double p0 = std::abs(p.atom_at(0.0)), q0 = std::abs(q.atom_at(0.0));
  constexpr double kSlack = 1e-9;

  std::vector<std::vector<BoundViolation>> found(samples.size());
  std::vector<double> ratio(samples.size(), 0.0);
  parallel_for(samples.size(), [&](std::size_t i) {
    const BoundSample& s = samples[i];
    const double k = std::abs(cube_root(s.lambda));
    const double growth = xi_bound(s.x, s.lambda) *
                          std::exp(3.0 * (2.0 * qv + pv.eval(s.x) + p0 + qf.eval(s.x) + q0));
    Eigen::Matrix3cd n = s.x == 0.0 ? Eigen::Matrix3cd::Identity() : fundamental_matrix(p, q, s.lambda, s.x, cfg).m;
    Eigen::Matrix3cd n0 = zero_potential(s.x, s.lambda).m;
    for (int j = 1; j <= 3; ++j) {
      const double rhs[2] = {3.0 * std::pow(k, 1 - j) * growth, 3.0 * std::pow(k, -j) * growth};
      const double lhs[2] = {std::abs(n(0, j - 1)), std::abs(n(0, j - 1) - n0(0, j - 1))};
      for (int b = 0; b < 2; ++b) {
        ratio[i] = std::max(ratio[i], lhs[b] / rhs[b]);
        if (lhs[b] > rhs[b] * (1.0 + kSlack)) found[i].push_back({s.x, s.lambda, j, b == 1, lhs[b], rhs[b]});
      }
    }
  });
  BoundAuditReport r;
  r.checks = static_cast<int>(6 * samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    r.max_ratio = std::max(r.max_ratio, ratio[i]);
    r.violations.insert(r.violations.end(), found[i].begin(), found[i].end());
  }
  return r;
}

ResidualReport asymptotic_residuals(const Measure& p, const Measure& q, int xi, int n_min, int n_max,
                                    const SpectrumConfig& cfg) {
  check_xi(xi);
  if (n_min > n_max) throw DomainError("asymptotic_residuals: empty n range");
  constexpr double pi = std::numbers::pi;
  auto kn = [&](int n) { return (2.0 * n + xi - 1) * pi; };
  if (std::abs(kn(n_min)) > kResidualKCeiling || std::abs(kn(n_max)) > kResidualKCeiling)
    throw DomainError("asymptotic_residuals: n range beyond |k| <= 40 pi");

  ResidualReport r;
  r.xi = xi;
  r.q_integral = q.function_integral();
  SpectrumConfig quiet = cfg;
  quiet.eigenfunctions = false;
  quiet.check_simplicity = false;
  auto eig = spectrum_scan(p, q, xi, n_min, n_max, quiet);
  for (const auto& e : eig) {
    const double k = kn(e.n);
    // k^3 - 2k Int q covers both boundary conditions
    const double lead = k * k * k - 2.0 * k * r.q_integral;
    r.ns.push_back(e.n);
    r.lambdas.push_back(e.lambda);
    r.leading.push_back(lead);
    r.residuals.push_back(e.lambda - lead);
  }
  const std::size_t half = (r.ns.size() + 1) / 2;
  for (std::size_t i = 0; i < r.ns.size(); ++i) {
    double a = std::abs(r.residuals[i]);
    if (i < half)
      r.lower_max = std::max(r.lower_max, a);
    else
      r.upper_max = std::max(r.upper_max, a);
  }
  r.verdict = r.upper_max <= 2.0 * r.lower_max;
  return r;
}

std::string convergence_csv_rows(const ConvergenceReport& r) {
  std::string out;
  char buf[128];
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.6e\n", r.params[i], r.values[i], r.reference, r.errors[i]);
    out += buf;
  }
  return out;
}

std::string continuity_csv_rows(const ContinuityReport& r) {
  std::string out;
  char buf[128];
  for (std::size_t i = 0; i < r.deltas.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6e,%.6e,%.6e,%.6e\n", r.deltas[i], r.sup_y[i], r.sup_yp[i], r.sup_w[i]);
    out += buf;
  }
  return out;
}

std::string bound_csv_rows(const BoundAuditReport& r) {
  std::string out;
  char buf[160];
  for (const auto& v : r.violations) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%s,%.6e,%.6e\n", v.x, v.lambda.real(), v.lambda.imag(), v.j,
                  v.difference ? "difference" : "value", v.lhs, v.rhs);
    out += buf;
  }
  return out;
}

std::string residual_csv_rows(const ResidualReport& r) {
  std::string out;
  char buf[128];
  for (std::size_t i = 0; i < r.ns.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.6e\n", r.xi, r.ns[i], r.lambdas[i], r.leading[i],
                  r.residuals[i]);
    out += buf;
  }
  return out;
}

}  // namespace stieltjes
