#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "stieltjes/errors.hpp"

namespace stieltjes {

// Closed [a,b] counts an atom sitting at a; half-open (a,b] does not.
enum class Interval { Closed, HalfOpen };

// Density on [lo,hi) as a polynomial in the local variable t - lo,
// constant term first.
struct PolynomialPiece {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> coeffs;

  double density(double x) const;
  // Integral of the density over [a,b] (both inside the piece).
  double mass(double a, double b) const;
};

struct Atom {
  double x = 0.0;
  double w = 0.0;
};

// Right-continuous BV function on [0,1] with f(0) = 0, stored as polynomial
// density pieces plus point masses. Immutable after construction.
class Measure {
 public:
  Measure() = default;
  Measure(std::vector<PolynomialPiece> pieces, std::vector<Atom> atoms);

  static Measure zero() { return {}; }
  static Measure lebesgue(double scale = 1.0);
  static Measure dirac(double a, double w = 1.0);
  static Measure density(std::vector<double> coeffs, double lo = 0.0, double hi = 1.0);

  const std::vector<PolynomialPiece>& pieces() const { return pieces_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool is_zero() const { return pieces_.empty() && atoms_.empty(); }
  bool purely_atomic() const { return pieces_.empty(); }

  // f(x), atoms at locations <= x included (f(0) = 0 regardless).
  double eval(double x) const;
  // f(x-), the left limit.
  double eval_left(double x) const;
  // Density at x, taken from the piece covering [x, x+).
  double density_at(double x) const;
  double atom_at(double x) const;

  // Sorted distinct points where f or its density may be non-smooth,
  // always including 0 and 1.
  std::vector<double> breakpoints() const;

  Measure scaled(double s) const;
  double max_abs_density() const;
  // sup over [0,1] of |f|.
  double sup_norm() const;
  // Lebesgue integral of the induced function over [0,1].
  double function_integral() const;

 private:
  std::vector<PolynomialPiece> pieces_;
  std::vector<Atom> atoms_;
};

// Explicit merge: densities add on the common refinement, atoms at equal
// locations are summed and dropped when they cancel.
Measure operator+(const Measure& a, const Measure& b);
Measure operator*(double s, const Measure& m);

double total_variation(const Measure& mu, double a = 0.0, double b = 1.0,
                       Interval kind = Interval::Closed);
// ||f||_V over [0,1], atom at 0 included.
inline double norm_v(const Measure& mu) { return total_variation(mu); }

// x -> V(f,(0,x]); a jump at 0 is outside (0,x] and does not appear.
Measure tv_function(const Measure& mu);

using ComplexFn = std::function<std::complex<double>(double)>;

std::complex<double> ls_integral(const ComplexFn& g, const Measure& mu, double a, double b,
                                 Interval kind);
// Integral over [0,x] (Closed) or (0,x] (HalfOpen).
std::complex<double> ls_integral(const ComplexFn& g, const Measure& mu, double x = 1.0,
                                 Interval kind = Interval::Closed);

// Density m on [1/2, min(1, 1/2 + 1/m)].
Measure ramp_sequence(int m);
// Cubic Hermite approximation of (1/m) sin(2 pi m^2 x).
Measure oscillation_sequence(int m, int nodes_per_period = 64);

struct RandomMeasureSpec {
  int atoms = 2;
  int pieces = 1;
  int max_degree = 2;
  double total_variation = 1.0;  // target ||f||_V after rescaling
  bool allow_atom_at_zero = true;
};
Measure random_measure(std::mt19937_64& rng, const RandomMeasureSpec& spec);

// JSON round trip: {"pieces":[{"lo","hi","coeffs"}],"atoms":[{"x","w"}]}.
std::string to_json(const Measure& mu);
Measure measure_from_json(const std::string& text);

// Coefficients of p(t + delta) given those of p(t).
std::vector<double> taylor_shift(const std::vector<double>& c, double delta);
// Real roots of the polynomial strictly inside (a,b), sorted.
std::vector<double> real_roots_in(const std::vector<double>& c, double a, double b);

}  // namespace stieltjes
