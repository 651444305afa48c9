#include "stieltjes/measure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "stieltjes/quadrature.hpp"

namespace stieltjes {

namespace {

double horner(const std::vector<double>& c, double t) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * t + *it;
  return s;
}

double antiderivative(const std::vector<double>& c, double t) {
  double s = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) s = s * t + c[j] / static_cast<double>(j + 1);
  return s * t;
}

// Integral of |p| over [s0,s1] in local coordinates.
double abs_integral(const std::vector<double>& c, double s0, double s1) {
  if (s1 <= s0) return 0.0;
  double total = 0.0;
  double prev = s0;
  auto roots = real_roots_in(c, s0, s1);
  roots.push_back(s1);
  for (double r : roots) {
    total += std::abs(antiderivative(c, r) - antiderivative(c, prev));
    prev = r;
  }
  return total;
}

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << what << " = " << x << " outside [0,1]";
    throw DomainError(os.str());
  }
}

}  // namespace

double PolynomialPiece::density(double x) const { return horner(coeffs, x - lo); }

double PolynomialPiece::mass(double a, double b) const {
  return antiderivative(coeffs, b - lo) - antiderivative(coeffs, a - lo);
}

std::vector<double> taylor_shift(const std::vector<double>& c, double delta) {
  std::vector<double> r = c;
  int n = static_cast<int>(r.size());
  for (int i = 0; i < n; ++i)
    for (int j = n - 2; j >= i; --j) r[j] += delta * r[j + 1];
  return r;
}

std::vector<double> real_roots_in(const std::vector<double>& c_in, double a, double b) {
  std::vector<double> c = c_in;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  std::vector<double> out;
  int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1) return out;
  std::vector<double> cand;
  if (deg == 1) {
    cand.push_back(-c[0] / c[1]);
  } else {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < deg; ++i) {
      auto z = es.eigenvalues()[i];
      if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z.real()))) continue;
      double x = z.real();
      std::vector<double> dc(deg);
      for (int j = 1; j <= deg; ++j) dc[j - 1] = j * c[j];
      for (int it = 0; it < 4; ++it) {
        double d = horner(dc, x);
        if (d == 0.0) break;
        x -= horner(c, x) / d;
      }
      cand.push_back(x);
    }
  }
  for (double x : cand)
    if (x > a && x < b) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double u, double v) { return std::abs(u - v) < 1e-14; }),
            out.end());
  return out;
}

Measure::Measure(std::vector<PolynomialPiece> pieces, std::vector<Atom> atoms)
    : pieces_(std::move(pieces)), atoms_(std::move(atoms)) {
  for (const auto& p : pieces_) {
    if (!(p.lo >= 0.0 && p.lo < p.hi && p.hi <= 1.0))
      throw DomainError("piece bounds must satisfy 0 <= lo < hi <= 1");
    if (p.coeffs.empty()) throw DomainError("piece needs at least one coefficient");
    for (double c : p.coeffs)
      if (!std::isfinite(c)) throw DomainError("non-finite piece coefficient");
  }
  std::sort(pieces_.begin(), pieces_.end(),
            [](const PolynomialPiece& u, const PolynomialPiece& v) { return u.lo < v.lo; });
  for (std::size_t i = 1; i < pieces_.size(); ++i)
    if (pieces_[i].lo < pieces_[i - 1].hi) throw DomainError("overlapping density pieces");
  for (const auto& at : atoms_) {
    check_unit(at.x, "atom location");
    if (at.w == 0.0 || !std::isfinite(at.w)) throw DomainError("atom weight must be finite and nonzero");
  }
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& u, const Atom& v) { return u.x < v.x; });
  for (std::size_t i = 1; i < atoms_.size(); ++i)
    if (atoms_[i].x == atoms_[i - 1].x)
      throw DomainError("atoms with equal locations; merge them explicitly");
}

Measure Measure::lebesgue(double scale) {
  if (scale == 0.0) return {};
  return Measure({PolynomialPiece{0.0, 1.0, {scale}}}, {});
}

Measure Measure::dirac(double a, double w) { return Measure({}, {Atom{a, w}}); }

Measure Measure::density(std::vector<double> coeffs, double lo, double hi) {
  return Measure({PolynomialPiece{lo, hi, std::move(coeffs)}}, {});
}

double Measure::eval(double x) const {
  check_unit(x, "x");
  if (x == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& a : atoms_) {
    if (a.x > x) break;
    s += a.w;
  }
  for (const auto& p : pieces_) {
    if (p.lo >= x) break;
    s += p.mass(p.lo, std::min(p.hi, x));
  }
  return s;
}

double Measure::eval_left(double x) const {
  if (x == 0.0) return 0.0;
  return eval(x) - atom_at(x);
}

double Measure::density_at(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const PolynomialPiece& p) { return v < p.lo; });
  if (it == pieces_.begin()) return 0.0;
  --it;
  if (x < it->hi || (x == 1.0 && it->hi == 1.0)) return it->density(x);
  return 0.0;
}

double Measure::atom_at(double x) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                             [](const Atom& a, double v) { return a.x < v; });
  if (it != atoms_.end() && it->x == x) return it->w;
  return 0.0;
}

std::vector<double> Measure::breakpoints() const {
  std::vector<double> b{0.0, 1.0};
  for (const auto& p : pieces_) {
    b.push_back(p.lo);
    b.push_back(p.hi);
  }
  for (const auto& a : atoms_) b.push_back(a.x);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

Measure Measure::scaled(double s) const {
  if (s == 0.0) return {};
  auto pieces = pieces_;
  auto atoms = atoms_;
  for (auto& p : pieces)
    for (auto& c : p.coeffs) c *= s;
  for (auto& a : atoms) a.w *= s;
  return Measure(std::move(pieces), std::move(atoms));
}

double Measure::max_abs_density() const {
  double m = 0.0;
  for (const auto& p : pieces_) {
    double h = p.hi - p.lo, s = 0.0, t = 1.0;
    for (double c : p.coeffs) {
      s += std::abs(c) * t;
      t *= h;
    }
    m = std::max(m, s);
  }
  return m;
}

double Measure::sup_norm() const {
  double m = 0.0;
  for (double x : breakpoints()) {
    m = std::max(m, std::abs(eval(x)));
    m = std::max(m, std::abs(eval_left(x)));
  }
  for (const auto& p : pieces_)
    for (double r : real_roots_in(p.coeffs, 0.0, p.hi - p.lo)) m = std::max(m, std::abs(eval(p.lo + r)));
  return m;
}

double Measure::function_integral() const {
  // int_0^1 f = sum_atoms w (1-a) + int density(t) (1-t) dt
  double s = 0.0;
  for (const auto& a : atoms_) s += a.w * (1.0 - a.x);
  for (const auto& p : pieces_) {
    double h = p.hi - p.lo;
    for (std::size_t j = 0; j < p.coeffs.size(); ++j) {
      double hj1 = std::pow(h, static_cast<double>(j + 1));
      s += p.coeffs[j] * ((1.0 - p.lo) * hj1 / (j + 1.0) - hj1 * h / (j + 2.0));
    }
  }
  return s;
}

Measure operator+(const Measure& a, const Measure& b) {
  std::vector<double> cuts;
  for (const auto* m : {&a, &b})
    for (const auto& p : m->pieces()) {
      cuts.push_back(p.lo);
      cuts.push_back(p.hi);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<PolynomialPiece> pieces;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double u = cuts[i], v = cuts[i + 1], mid = 0.5 * (u + v);
    std::vector<double> sum;
    bool covered = false;
    for (const auto* m : {&a, &b})
      for (const auto& p : m->pieces()) {
        if (p.lo <= mid && mid < p.hi) {
          auto c = taylor_shift(p.coeffs, u - p.lo);
          if (c.size() > sum.size()) sum.resize(c.size(), 0.0);
          for (std::size_t j = 0; j < c.size(); ++j) sum[j] += c[j];
          covered = true;
        }
      }
    if (covered) pieces.push_back({u, v, sum});
  }
  std::vector<Atom> atoms = a.atoms();
  for (const auto& at : b.atoms()) {
    auto it = std::find_if(atoms.begin(), atoms.end(), [&](const Atom& o) { return o.x == at.x; });
    if (it == atoms.end())
      atoms.push_back(at);
    else
      it->w += at.w;
  }
  std::erase_if(atoms, [](const Atom& at) { return at.w == 0.0; });
  return Measure(std::move(pieces), std::move(atoms));
}

Measure operator*(double s, const Measure& m) { return m.scaled(s); }

double total_variation(const Measure& mu, double a, double b, Interval kind) {
  check_unit(a, "a");
  check_unit(b, "b");
  if (b < a) throw DomainError("interval with b < a");
  double tv = 0.0;
  for (const auto& at : mu.atoms()) {
    bool in = kind == Interval::Closed ? (at.x >= a && at.x <= b) : (at.x > a && at.x <= b);
    if (in) tv += std::abs(at.w);
  }
  for (const auto& p : mu.pieces()) {
    double u = std::max(p.lo, a), v = std::min(p.hi, b);
    if (v > u) tv += abs_integral(p.coeffs, u - p.lo, v - p.lo);
  }
  return tv;
}

Measure tv_function(const Measure& mu) {
  std::vector<PolynomialPiece> pieces;
  for (const auto& p : mu.pieces()) {
    double h = p.hi - p.lo;
    std::vector<double> cuts{0.0};
    for (double r : real_roots_in(p.coeffs, 0.0, h)) cuts.push_back(r);
    cuts.push_back(h);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double mid = 0.5 * (cuts[i] + cuts[i + 1]);
      double sign = horner(p.coeffs, mid) < 0.0 ? -1.0 : 1.0;
      auto c = taylor_shift(p.coeffs, cuts[i]);
      for (auto& v : c) v *= sign;
      double lo = p.lo + cuts[i];
      double hi = i + 2 == cuts.size() ? p.hi : p.lo + cuts[i + 1];
      if (hi > lo) pieces.push_back({lo, hi, c});
    }
  }
  std::vector<Atom> atoms;
  for (const auto& at : mu.atoms())
    if (at.x > 0.0) atoms.push_back({at.x, std::abs(at.w)});
  return Measure(std::move(pieces), std::move(atoms));
}

std::complex<double> ls_integral(const ComplexFn& g, const Measure& mu, double a, double b,
                                 Interval kind) {
  check_unit(a, "a");
  check_unit(b, "b");
  std::complex<double> s = 0.0;
  for (const auto& at : mu.atoms()) {
    bool in = kind == Interval::Closed ? (at.x >= a && at.x <= b) : (at.x > a && at.x <= b);
    if (in) s += g(at.x) * at.w;
  }
  for (const auto& p : mu.pieces()) {
    double u = std::max(p.lo, a), v = std::min(p.hi, b);
    if (v > u) s += integrate([&](double t) { return g(t) * p.density(t); }, u, v, 1e-14, 1e-13);
  }
  return s;
}

std::complex<double> ls_integral(const ComplexFn& g, const Measure& mu, double x, Interval kind) {
  return ls_integral(g, mu, 0.0, x, kind);
}

Measure ramp_sequence(int m) {
  if (m < 1) throw DomainError("ramp_sequence needs m >= 1");
  return Measure::density({static_cast<double>(m)}, 0.5, std::min(1.0, 0.5 + 1.0 / m));
}

Measure oscillation_sequence(int m, int nodes_per_period) {
  if (m < 1) throw DomainError("oscillation_sequence needs m >= 1");
  if (nodes_per_period < 32) throw DomainError("oscillation_sequence needs >= 32 nodes per period");
  const double two_pi = 2.0 * std::numbers::pi;
  const double om = two_pi * m * m;
  const double amp = two_pi * m;
  auto d = [&](double x) { return amp * std::cos(om * x); };
  auto dd = [&](double x) { return -amp * om * std::sin(om * x); };
  long cells = static_cast<long>(nodes_per_period) * m * m;
  std::vector<PolynomialPiece> pieces;
  pieces.reserve(cells);
  for (long i = 0; i < cells; ++i) {
    double lo = static_cast<double>(i) / cells;
    double hi = i + 1 == cells ? 1.0 : static_cast<double>(i + 1) / cells;
    double h = hi - lo;
    double f0 = d(lo), f1 = d(hi), g0 = dd(lo), g1 = dd(hi);
    double slope = (f1 - f0) / h;
    pieces.push_back({lo, hi, {f0, g0, (3.0 * slope - 2.0 * g0 - g1) / h, (g0 + g1 - 2.0 * slope) / (h * h)}});
  }
  return Measure(std::move(pieces), {});
}

Measure random_measure(std::mt19937_64& rng, const RandomMeasureSpec& spec) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::vector<Atom> atoms;
  for (int i = 0; i < spec.atoms; ++i) {
    double x = (spec.allow_atom_at_zero && i == 0 && unit(rng) < 0.25) ? 0.0 : unit(rng);
    double w = sym(rng);
    if (w == 0.0) w = 0.5;
    if (std::none_of(atoms.begin(), atoms.end(), [&](const Atom& a) { return a.x == x; }))
      atoms.push_back({x, w});
  }
  std::vector<double> cuts;
  for (int i = 0; i < 2 * spec.pieces; ++i) cuts.push_back(unit(rng));
  std::sort(cuts.begin(), cuts.end());
  std::vector<PolynomialPiece> pieces;
  for (int i = 0; i < spec.pieces; ++i) {
    double lo = cuts[2 * i], hi = cuts[2 * i + 1];
    if (!(hi > lo)) continue;
    std::vector<double> c(spec.max_degree + 1);
    for (auto& v : c) v = sym(rng);
    pieces.push_back({lo, hi, c});
  }
  Measure m(std::move(pieces), std::move(atoms));
  double tv = total_variation(m);
  if (tv == 0.0 || spec.total_variation == 0.0) return {};
  return m.scaled(spec.total_variation / tv);
}

std::string to_json(const Measure& mu) {
  nlohmann::json j;
  j["pieces"] = nlohmann::json::array();
  j["atoms"] = nlohmann::json::array();
  for (const auto& p : mu.pieces()) j["pieces"].push_back({{"lo", p.lo}, {"hi", p.hi}, {"coeffs", p.coeffs}});
  for (const auto& a : mu.atoms()) j["atoms"].push_back({{"x", a.x}, {"w", a.w}});
  return j.dump();
}

Measure measure_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid measure JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("measure JSON must be an object");
  try {
    std::vector<PolynomialPiece> pieces;
    std::vector<Atom> atoms;
    if (j.contains("pieces"))
      for (const auto& p : j.at("pieces"))
        pieces.push_back({p.at("lo").get<double>(), p.at("hi").get<double>(),
                          p.at("coeffs").get<std::vector<double>>()});
    if (j.contains("atoms"))
      for (const auto& a : j.at("atoms")) atoms.push_back({a.at("x").get<double>(), a.at("w").get<double>()});
    return Measure(std::move(pieces), std::move(atoms));
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed measure JSON: ") + e.what());
  }
}

}  // namespace stieltjes
