#include "stieltjes/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace stieltjes {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.5;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

namespace {

std::complex<double> panel(const std::function<std::complex<double>(double)>& f, double a,
                           double b, const GaussRule& r) {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(a + (b - a) * r.nodes[i]);
  return s * (b - a);
}

std::complex<double> adapt(const std::function<std::complex<double>(double)>& f, double a,
                           double b, std::complex<double> whole, double tol, int depth,
                           const GaussRule& r) {
  double m = 0.5 * (a + b);
  auto left = panel(f, a, m, r);
  auto right = panel(f, m, b, r);
  auto both = left + right;
  if (depth <= 0 || std::abs(both - whole) <= tol) return both;
  return adapt(f, a, m, left, 0.5 * tol, depth - 1, r) +
         adapt(f, m, b, right, 0.5 * tol, depth - 1, r);
}

}  // namespace

std::complex<double> integrate(const std::function<std::complex<double>(double)>& f, double a,
                               double b, double abs_tol, double rel_tol) {
  if (b <= a) return 0.0;
  const GaussRule& r = gauss_legendre(20);
  auto whole = panel(f, a, b, r);
  double tol = std::max(abs_tol, rel_tol * std::abs(whole));
  return adapt(f, a, b, whole, tol, 40, r);
}

}  // namespace stieltjes
