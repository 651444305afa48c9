// Runs the fourteen acceptance criteria and prints one PASS/FAIL line each.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "stieltjes/lab.hpp"

using namespace stieltjes;

namespace {

constexpr double pi = std::numbers::pi;
const double kMaxLambda = std::pow(6 * pi, 3);

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

Complex random_lambda(std::mt19937_64& rng, double max_abs) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // uniform in the disc
  return std::polar(max_abs * std::sqrt(u(rng)), 2 * pi * u(rng));
}

double natural_scale(Complex lambda, double x, int i, int j) {
  double k = std::abs(cube_root(lambda));
  return std::max(1.0, std::pow(k, i - j) * xi_bound(x, lambda));
}

// eigenpairs gathered by the spectral criteria, audited by AC7 and AC9
std::vector<Eigenpair> g_pool;

void add_pool(const std::vector<Eigenpair>& v) { g_pool.insert(g_pool.end(), v.begin(), v.end()); }

Verdict ac1() {
  std::mt19937_64 rng(101);
  Measure z;
  double scaled = 0.0, absolute = 0.0;
  for (int s = 0; s < 50; ++s) {
    Complex lam = random_lambda(rng, kMaxLambda);
    for (int c = 0; c < 3; ++c) {
      InitialTriple init;
      (c == 0 ? init.y0 : c == 1 ? init.z0 : init.w0) = 1.0;
      SolutionPath path = solve_picard(z, z, lam, init);
      for (const auto& nd : path.nodes) {
        Eigen::Matrix3cd n0 = zero_potential(nd.x, lam).m;
        Complex got[3] = {nd.y, nd.yp, nd.w};
        for (int r = 0; r < 3; ++r) {
          double e = std::abs(got[r] - n0(r, c));
          absolute = std::max(absolute, e);
          scaled = std::max(scaled, e / natural_scale(lam, nd.x, r, c));
        }
      }
    }
  }
  return {scaled <= 1e-9, fmt("zero-potential oracle, 50 lambdas |lambda|<=(6pi)^3: max error %.2e relative to "
                              "natural entry scale (absolute %.2e), tol 1e-9",
                              scaled, absolute)};
}

Verdict ac2() {
  std::mt19937_64 rng(202);
  int total = 0, ok = 0;
  double worst = 0.0, worst_scaled = 0.0;
  std::vector<double> xs;
  for (int i = 0; i <= 16; ++i) xs.push_back(i / 16.0);
  for (int s = 0; s < 25; ++s) {
    Measure p = random_measure(rng, {2, 2, 2, 1.0, true});
    Measure q = random_measure(rng, {2, 2, 2, 0.5, true});
    for (int l = 0; l < 5; ++l) {
      Complex lam = random_lambda(rng, kMaxLambda);
      for (const auto& fm : fundamental_matrices(p, q, lam, xs)) {
        double d = std::abs(fm.det() - 1.0);
        ++total;
        ok += d <= 1e-8;
        worst = std::max(worst, d);
        worst_scaled = std::max(worst_scaled, fm.scaled_det_defect());
      }
    }
  }
  return {ok == total, fmt("det N = 1 within 1e-8: %d/%d samples pass, max |det-1| %.2e, max conditioning-scaled "
                           "defect %.2e (|lambda|<=(6pi)^3)",
                           ok, total, worst, worst_scaled)};
}

Verdict ac3() {
  SolutionPath path = solve_picard(Measure::dirac(0.5), Measure::zero(), 0.0, {1.0, 0.0, 0.0});
  int idx = path.find(0.5);
  const PathNode& at = path.nodes.at(idx);
  Complex w1 = path.back().w;
  double e1 = std::abs(w1 - Complex(0, 1)), el = std::abs(at.w_left), er = std::abs(at.w - Complex(0, 1));
  bool pass = e1 <= 1e-10 && el <= 1e-10 && er <= 1e-10 && at.is_atom;
  return {pass, fmt("p=delta_1/2, lambda=0: |w(1)-i| %.1e, |w(1/2-)| %.1e, |w(1/2+)-i| %.1e", e1, el, er)};
}

Verdict ac4() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  std::vector<double> xs;
  for (int i = 0; i <= 64; ++i) xs.push_back(i / 64.0);
  for (int s = 0; s < 20; ++s) {
    Measure p = random_measure(rng, {3, 0, 0, 1.0, true});
    Measure q = random_measure(rng, {2, 0, 0, 0.5, true});
    Complex lam = random_lambda(rng, 64.0);
    InitialTriple init{Complex(1.0, 0.2), Complex(-0.3, 0.5), Complex(0.1, -0.4)};
    SolutionPath a = solve_picard(p, q, lam, init);
    SolutionPath b = solve_transfer(p, q, lam, init, xs);
    for (const auto& nd : b.nodes) {
      Eigen::Vector3cd sa = a.state(nd.x);
      worst = std::max({worst, std::abs(sa(0) - nd.y), std::abs(sa(1) - nd.yp), std::abs(sa(2) - nd.w)});
    }
  }
  return {worst <= 1e-8, fmt("Picard vs transfer on 20 atomic (p,q), |lambda|<=64: sup difference %.2e, tol 1e-8", worst)};
}

Verdict ac5() {
  Measure z;
  // true roots of 2 Y1 for the second problem (k for n = 0..5, mpmath)
  const double true_k2[6] = {2.99433607025793508, 9.42534820601414283, 15.7079607956100113,
                             21.9911485858422140, 28.2743338822617123, 34.5575191894879268};
  double worst1 = 0.0, worst2 = 0.0, worst_true = 0.0;
  std::vector<int> bad2;
  for (int xi : {1, 2}) {
    auto eig = spectrum_scan(z, z, xi, -5, 5);
    add_pool(eig);
    for (const auto& e : eig) {
      double k = (2.0 * e.n + xi - 1) * pi, ref = k * k * k;
      double rel = std::abs(e.lambda - ref) / std::max(1.0, std::abs(ref));
      if (xi == 1) {
        worst1 = std::max(worst1, rel);
      } else {
        worst2 = std::max(worst2, rel);
        if (rel > 1e-6) bad2.push_back(e.n);
        double kt = e.n >= 0 ? true_k2[e.n] : -true_k2[-e.n - 1];
        worst_true = std::max(worst_true, std::abs(e.lambda - kt * kt * kt) / (kt * kt * kt > 0 ? kt * kt * kt : -kt * kt * kt));
      }
    }
  }
  std::string bad;
  for (int n : bad2) bad += (bad.empty() ? "" : ",") + std::to_string(n);
  return {worst1 <= 1e-6 && worst2 <= 1e-6,
          fmt("|n|<=5: xi=1 max rel err %.1e; xi=2 vs ((2n+1)pi)^3 max rel err %.1e (fails at n=%s); "
              "xi=2 vs the true roots of Delta_2 max rel err %.1e",
              worst1, worst2, bad.empty() ? "none" : bad.c_str(), worst_true)};
}

Verdict ac6() {
  std::mt19937_64 rng(606);
  const double c_pi = 8.0;
  int checks = 0, ok = 0;
  std::string worst;
  for (int s = 0; s < 5; ++s) {
    Measure p = random_measure(rng, {2, 1, 2, 0.1, true});
    Measure q = random_measure(rng, {1, 1, 2, 0.03, true});
    for (int xi : {1, 2}) {
      int N = counting_threshold(p, q, xi, c_pi);
      double radius = xi == 1 ? (2 * N + 1) * pi : 2 * N * pi;
      int want = xi == 1 ? 2 * N + 1 : 2 * N;
      int got = count_zeros_disc(p, q, xi, 0.0, radius);
      ++checks;
      if (got == want) ++ok;
      else worst += fmt(" [central xi=%d N=%d: %d != %d]", xi, N, got, want);
      for (int a = N; a <= N + 3; ++a)
        for (int n : {a, -a}) {
          int c = count_zeros_disc(p, q, xi, (2.0 * n + xi - 1) * pi, pi / 3);
          ++checks;
          if (c == 1) ++ok;
          else worst += fmt(" [disc xi=%d n=%d: %d]", xi, n, c);
        }
    }
  }
  return {ok == checks, fmt("5 random (p,q) with ||p||+3||q||<=0.2, C_pi=8: %d/%d counts exact%s", ok, checks,
                            worst.c_str())};
}

Verdict ac7() {
  std::mt19937_64 rng(707);
  for (int s = 0; s < 3; ++s) {
    Measure p = random_measure(rng, {2, 1, 2, 1.0, true});
    Measure q = random_measure(rng, {2, 1, 2, 0.4, true});
    for (int xi : {1, 2}) add_pool(spectrum_scan(p, q, xi, -3, 5));
  }
  double worst = 0.0;
  int counted = 0;
  for (const auto& e : g_pool) {
    if (e.E.nodes.empty()) continue;
    worst = std::max(worst, e.imag_residue);
    ++counted;
  }
  return {counted > 0 && worst < 1e-8,
          fmt("%d eigenvalues (zero potential and random (p,q)): max imaginary residue %.2e, tol 1e-8", counted, worst)};
}

Verdict ac8() {
  std::mt19937_64 rng(808);
  Measure p = random_measure(rng, {2, 1, 2, 0.8, true});
  Measure q = random_measure(rng, {1, 1, 2, 0.3, true});
  double worst = 0.0;
  int pairs = 0;
  for (int xi : {1, 2}) {
    auto base = spectrum_scan(p, q, xi, 0, 2);
    add_pool(base);
    for (double eps : {0.01, -0.01}) {
      auto moved = spectrum_scan(p + Measure::lebesgue(eps), q, xi, 0, 2);
      add_pool(moved);
      for (std::size_t i = 0; i < base.size(); ++i) {
        worst = std::max(worst, std::abs(moved[i].lambda - base[i].lambda - eps));
        ++pairs;
      }
    }
  }
  return {worst <= 1e-7, fmt("6 eigenvalues x eps=+-0.01 (%d shifts): max |shift - eps| %.2e, tol 1e-7", pairs, worst)};
}

Verdict ac9() {
  double bc = 0.0, nr = 0.0;
  int counted = 0;
  for (const auto& e : g_pool) {
    if (e.g_mult != 1 || !e.a_simple || e.E.nodes.empty()) continue;
    bc = std::max(bc, e.bc_residual);
    nr = std::max(nr, e.norm_residual);
    ++counted;
  }
  return {counted > 0 && bc < 1e-8 && nr < 1e-8,
          fmt("%d simple eigenpairs: max boundary residual %.2e, max |norm-1| %.2e, tol 1e-8", counted, bc, nr)};
}

Verdict ac10() {
  Measure p = Measure::lebesgue(0.5) + Measure::dirac(0.6, 0.3);
  Measure q = Measure::density({0.2, 0.3});
  const std::vector<std::pair<int, int>> modes = {{1, 1}, {1, 2}, {2, 0}, {2, 1}};
  const std::vector<std::pair<const char*, Measure>> dirs = {
      {"lebesgue", Measure::lebesgue()}, {"delta_1/4", Measure::dirac(0.25)}, {"ramp10", ramp_sequence(10)}};
  double worst = 0.0;
  int tables = 0, monotone = 0;
  std::string where;
  for (auto [xi, n] : modes) {
    Eigenpair eig = find_eigenvalue(p, q, xi, n);
    add_pool({eig});
    for (const auto& [name, nu] : dirs)
      for (Direction d : {Direction::P, Direction::Q}) {
        FdTable t = fd_check(p, q, eig, nu, d, {1e-2, 1e-3, 1e-4});
        double rel = t.rows.back().abs_err / std::abs(t.formula);
        if (rel > worst) {
          worst = rel;
          where = fmt("xi=%d n=%d %s %s", xi, n, d == Direction::P ? "p" : "q", name);
        }
        ++tables;
        monotone += t.decreasing;
      }
  }
  return {worst <= 1e-3 && monotone == tables,
          fmt("%d FD tables: max relative error at eps=1e-4 %.2e (%s), tol 1e-3; error decreasing in %d/%d",
              tables, worst, where.c_str(), monotone, tables)};
}

Verdict ac11() {
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> ux(0.3, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 5; ++s) {
    Measure p = random_measure(rng, {2, 1, 2, 1.0, true});
    Measure q = random_measure(rng, {2, 1, 2, 0.5, true});
    Measure nu = random_measure(rng, {1, 1, 2, 1.0, false});
    Complex lam = random_lambda(rng, 500.0);
    double x = ux(rng);
    for (Direction d : {Direction::P, Direction::Q}) worst = std::max(worst, dN_fd_error(p, q, lam, x, nu, d, 1e-4));
  }
  return {worst <= 1e-3, fmt("5 random configurations x {dp,dq}: max entrywise relative FD error %.2e at eps=1e-4, "
                             "tol 1e-3",
                             worst)};
}

Verdict ac12() {
  ConvergenceReport r = weakstar_eig([](int m) { return ramp_sequence(m); }, {10, 100, 1000}, Measure::dirac(0.5),
                                     Measure::zero(), 1, 1, Direction::P);
  bool failed = false;
  for (const auto& f : r.failures) failed |= !f.empty();
  bool dec = r.errors[1] < r.errors[0] && r.errors[2] < r.errors[1];
  return {!failed && dec && r.errors[2] < 1e-2,
          fmt("ramp_m -> delta_1/2, lambda_{1,1}: errors %.2e, %.2e, %.2e for m=10,100,1000", r.errors[0],
              r.errors[1], r.errors[2])};
}

Verdict ac13() {
  std::mt19937_64 rng(1313);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0, checks = 0;
  double ratio = 0.0;
  for (int s = 0; s < 100; ++s) {
    Measure p = random_measure(rng, {2, 1, 2, 1.5 * u(rng), true});
    Measure q = random_measure(rng, {2, 1, 2, 1.0 * u(rng), true});
    double x = u(rng);
    double k = 1.0 + (6 * pi - 1.0) * u(rng);
    Complex lam = std::polar(k * k * k, 2 * pi * u(rng));
    BoundAuditReport r = bound_audit(p, q, {{x, lam}});
    violations += static_cast<int>(r.violations.size());
    checks += r.checks;
    ratio = std::max(ratio, r.max_ratio);
  }
  return {violations == 0, fmt("100 random (x,lambda,p,q), 1<=|k|<=6pi: %d violations in %d inequality checks, "
                               "largest lhs/rhs %.3f",
                               violations, checks, ratio)};
}

Verdict ac14() {
  Measure q = Measure::lebesgue();
  ResidualReport a = asymptotic_residuals(Measure::zero(), q, 1, 5, 12);
  ResidualReport b = asymptotic_residuals(Measure::zero(), q, 2, 5, 12);
  return {a.verdict && b.verdict,
          fmt("q=Lebesgue, n=5..12: xi=1 upper max %.3e vs lower max %.3e; xi=2 upper %.3e vs lower %.3e",
              a.upper_max, a.lower_max, b.upper_max, b.lower_max)};
}

struct Criterion {
  int id;
  double budget_s;  // 0: none stated
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, 30, ac1},   {2, 60, ac2},   {3, 1, ac3},    {4, 60, ac4},   {5, 60, ac5},
      {6, 300, ac6},  {7, 0, ac7},    {8, 60, ac8},   {9, 0, ac9},    {10, 300, ac10},
      {11, 120, ac11}, {12, 120, ac12}, {13, 60, ac13}, {14, 300, ac14}};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = c.budget_s == 0 || secs <= c.budget_s;
    if (!in_time) v.detail += fmt("; over the %.0f s budget", c.budget_s);
    bool pass = v.pass && in_time;
    failed += !pass;
    std::string budget = c.budget_s > 0 ? fmt(" / %.0f s", c.budget_s) : "";
    std::printf("AC%-2d %s  %s  [%.1f s%s]\n", c.id, pass ? "PASS" : "FAIL", v.detail.c_str(), secs, budget.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
