#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace stieltjes {

struct GaussRule {
  std::vector<double> nodes;    // on [0,1]
  std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre rule with n points mapped to [0,1]. Cached per n.
const GaussRule& gauss_legendre(int n);

// Adaptive Gauss-Legendre integration of a complex integrand on [a,b].
std::complex<double> integrate(const std::function<std::complex<double>(double)>& f, double a,
                               double b, double abs_tol = 1e-13, double rel_tol = 1e-12);

}  // namespace stieltjes
