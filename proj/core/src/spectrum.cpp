#include "stieltjes/spectrum.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "engine.hpp"
#include "stieltjes/quadrature.hpp"
#include "stieltjes/parallel.hpp"

namespace stieltjes {

namespace {

constexpr double kPi = std::numbers::pi;

struct ContourTooClose {};

double sign_of(int xi) { return xi == 1 ? -1.0 : 1.0; }

Complex y1_at(const Measure& p, const Measure& q, Complex lambda, const SolverConfig& cfg) {
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(3, 1);
  e(0, 0) = 1.0;
  return end_states(p, q, lambda, e, cfg)(0, 0);
}

// Z1 (xi = 1) or Y1 (xi = 2) at real lambda; same zeros as Delta_xi.
double real_char(const Measure& p, const Measure& q, int xi, double lambda, const SolverConfig& cfg) {
  Complex y1 = y1_at(p, q, lambda, cfg);
  return xi == 1 ? y1.imag() : y1.real();
}

double kcube(double k) { return k * k * k; }

struct DeltaSample {
  Complex value;
  double err = 0.0;
};

DeltaSample delta_sample(const Measure& p, const Measure& q, int xi, Complex lambda, const SolverConfig& cfg) {
  Complex y1 = y1_at(p, q, lambda, cfg);
  Complex y1c = lambda.imag() == 0.0 ? std::conj(y1) : std::conj(y1_at(p, q, std::conj(lambda), cfg));
  // solver error is a small multiple of eps times the growth envelope
  return {y1c + sign_of(xi) * y1, 1e-13 * xi_bound(1.0, lambda)};
}

// Winding number of Delta along lambda = z(t), t in [0,1], z(1) = z(0).
int winding(const Measure& p, const Measure& q, int xi, const std::function<Complex(double)>& z,
            const SpectrumConfig& cfg) {
  const double max_step = 1.0 / std::max(16, cfg.contour_points);
  DeltaSample f0 = delta_sample(p, q, xi, z(0.0), cfg.solver);
  if (std::abs(f0.value) <= 10.0 * f0.err) throw ContourTooClose{};
  double t = 0.0, step = max_step, total = 0.0;
  while (t < 1.0) {
    double t1 = std::min(1.0, t + step);
    DeltaSample f1 = delta_sample(p, q, xi, z(t1), cfg.solver);
    if (!(std::abs(f1.value) > 10.0 * f1.err)) throw ContourTooClose{};
    double d = std::arg(f1.value / f0.value);
    double ratio = std::abs(f1.value) / std::abs(f0.value);
    if (std::abs(d) > kPi / 4 || ratio > 4.0 || ratio < 0.25) {
      if (step < 1e-9) throw ContourTooClose{};
      step *= 0.5;
      continue;
    }
    total += d;
    t = t1;
    f0 = f1;
    if (std::abs(d) < kPi / 16 && ratio < 2.0 && ratio > 0.5) step = std::min(max_step, step * 1.5);
  }
  double w = total / (2.0 * kPi);
  double r = std::round(w);
  if (std::abs(w - r) > 0.2)
    throw ResolutionError("argument principle: non-integer winding " + std::to_string(w));
  return static_cast<int>(r);
}

// Retries with slightly perturbed radii when the contour passes too close to a zero.
template <class MakeContour>
int winding_with_retry(const Measure& p, const Measure& q, int xi, double radius, MakeContour make,
                       const SpectrumConfig& cfg) {
  for (double f : {1.0, 1.01, 0.99, 1.02, 0.98}) {
    try {
      return winding(p, q, xi, make(radius * f), cfg);
    } catch (const ContourTooClose&) {
    }
  }
  throw ResolutionError("argument principle: contour too close to a zero (radius " + std::to_string(radius) + ")");
}

struct Root {
  double k = 0.0;
  bool sign_change = true;
  int multiplicity = 1;
};

double newton_polish(const Measure& p, const Measure& q, int xi, double lambda, double lo, double hi,
                     const SolverConfig& cfg) {
  double f = real_char(p, q, xi, lambda, cfg);
  for (int it = 0; it < 3 && f != 0.0; ++it) {
    double h = 1e-6 * std::max(1.0, std::abs(lambda));
    double d = (real_char(p, q, xi, lambda + h, cfg) - real_char(p, q, xi, lambda - h, cfg)) / (2.0 * h);
    if (d == 0.0 || !std::isfinite(d)) break;
    double next = lambda - f / d;
    if (!(next >= lo && next <= hi)) break;
    double fn = real_char(p, q, xi, next, cfg);
    if (!(std::abs(fn) < std::abs(f))) break;
    lambda = next;
    f = fn;
  }
  return lambda;
}

// Golden-section search for a touching (double) root between a and b.
std::optional<double> touching_root(const Measure& p, const Measure& q, int xi, double a, double b,
                                    const SolverConfig& cfg) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double k) { return std::abs(real_char(p, q, xi, kcube(k), cfg)); };
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  double k = 0.5 * (a + b);
  if (f(k) <= 1e-8 * xi_bound(1.0, kcube(k))) return k;
  return std::nullopt;
}

std::vector<double> scan_values(const Measure& p, const Measure& q, int xi, const std::vector<double>& ks,
                                const SolverConfig& cfg) {
  std::vector<double> f(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) { f[i] = real_char(p, q, xi, kcube(ks[i]), cfg); });
  return f;
}

// Roots of the real characteristic function on (lo, hi) from a uniform scan.
std::vector<Root> scan_roots(const Measure& p, const Measure& q, int xi, double lo, double hi, double step,
                             bool look_for_touching, const SpectrumConfig& cfg) {
  int n = std::max(4, static_cast<int>(std::ceil((hi - lo) / step)));
  double h = (hi - lo) / n;
  std::vector<double> ks(n);
  for (int j = 0; j < n; ++j) ks[j] = lo + (j + 0.5) * h;
  auto f = scan_values(p, q, xi, ks, cfg.solver);

  std::vector<std::pair<double, double>> brackets;
  std::vector<Root> exact;
  for (int j = 0; j < n; ++j) {
    if (f[j] == 0.0) exact.push_back({ks[j], true, 1});
    if (j + 1 < n && f[j] != 0.0 && f[j + 1] != 0.0 && (f[j] < 0) != (f[j + 1] < 0))
      brackets.push_back({ks[j], ks[j + 1]});
  }
  std::vector<Root> roots(brackets.size());
  parallel_for(brackets.size(), [&](std::size_t i) {
    roots[i].k = refine_root(p, q, xi, brackets[i].first, brackets[i].second, cfg);
  });
  roots.insert(roots.end(), exact.begin(), exact.end());
  if (look_for_touching) {
    for (int j = 1; j + 1 < n; ++j) {
      double a = std::abs(f[j - 1]), b = std::abs(f[j]), c = std::abs(f[j + 1]);
      bool same = (f[j - 1] < 0) == (f[j] < 0) && (f[j] < 0) == (f[j + 1] < 0);
      if (same && b < a && b < c) {
        if (auto k = touching_root(p, q, xi, ks[j - 1], ks[j + 1], cfg.solver)) roots.push_back({*k, false, 2});
      }
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.k < b.k; });
  return roots;
}

int total_multiplicity(const std::vector<Root>& roots) {
  int m = 0;
  for (const auto& r : roots) m += r.multiplicity;
  return m;
}

// --- eigenfunctions -------------------------------------------------------

double k_scale(double lambda) { return std::max(1.0, std::abs(std::cbrt(lambda))); }

// Scale and rotate so that int |y|^2 dx = 1 and the dominant of (y(0), y'(0)/K) is real positive.
void normalize_path(SolutionPath& path, double K) {
  double norm2 = path.integrate([](const PathNode& nd) { return Complex(std::norm(nd.y)); }).real();
  if (!(norm2 > 0.0)) throw NumericError("eigenfunction has zero L2 norm");
  const PathNode& n0 = path.nodes.front();
  Complex pivot = std::abs(n0.y) >= std::abs(n0.yp) / K ? n0.y : n0.yp;
  Complex mult = (pivot == Complex(0.0) ? Complex(1.0) : std::conj(pivot) / std::abs(pivot)) / std::sqrt(norm2);
  for (auto& nd : path.nodes) {
    nd.y *= mult;
    nd.yp *= mult;
    nd.w *= mult;
    nd.w_left *= mult;
  }
  for (auto& j : path.jumps) j.dw *= mult;
}

// int |E|^2 dx by a 20-point rule per cell on the interpolated state.
double requadrature_norm(const SolutionPath& path) {
  const GaussRule& r = gauss_legendre(20);
  auto e = path.edges();
  double s = 0.0;
  for (std::size_t c = 0; c + 1 < e.size(); ++c) {
    double a = e[c], h = e[c + 1] - e[c];
    if (h <= 0.0) continue;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += h * r.weights[i] * std::norm(path.state(a + h * r.nodes[i])(0));
  }
  return s;
}

double bc_residual(const SolutionPath& path, int xi) {
  const PathNode& a = path.nodes.front();
  const PathNode& b = path.nodes.back();
  double sigma = xi == 1 ? 1.0 : -1.0;
  return std::max({std::abs(b.y), std::abs(b.yp - sigma * a.yp), std::abs(a.w_left)});
}

struct ShootingData {
  SolutionPath path;
  double continuity = 0.0;
};

ShootingData build_shooting_path(const detail::Engine& eng, const std::vector<Eigen::Vector3cd>& s, double K) {
  const int C = eng.cells();
  const int g = eng.rule().g;
  ShootingData out;
  SolutionPath& path = out.path;
  path.gauss_nodes = g;
  path.nodes.reserve(static_cast<std::size_t>(C) * (g + 1) + 1);
  Eigen::Vector3d d(1.0, 1.0 / K, 1.0 / (K * K));
  double smax = 0.0, defect = 0.0;
  for (const auto& v : s) smax = std::max(smax, d.cwiseProduct(v.cwiseAbs()).maxCoeff());
  auto edge_node = [&](int e) {
    PathNode nd;
    nd.x = eng.edge(e);
    nd.y = s[e](0);
    nd.yp = s[e](1);
    nd.w = s[e](2);
    nd.w_left = s[e](2) - eng.jump_coefficient(e) * s[e](0);
    nd.is_atom = eng.has_atom(e);
    if (nd.is_atom) path.jumps.push_back({nd.x, nd.w - nd.w_left});
    path.nodes.push_back(nd);
  };
  Eigen::MatrixXcd inner;
  for (int c = 0; c < C; ++c) {
    edge_node(c);
    Eigen::MatrixXcd col = s[c];
    Eigen::MatrixXcd end = eng.advance(c, col, &inner);
    const detail::Cell& cl = eng.cell(c);
    for (int i = 0; i < g; ++i) {
      PathNode nd;
      nd.x = cl.a + cl.h * eng.rule().tau(i);
      nd.weight = cl.h * eng.rule().omega(i);
      nd.y = inner(3 * i, 0);
      nd.yp = inner(3 * i + 1, 0);
      nd.w = nd.w_left = inner(3 * i + 2, 0);
      path.nodes.push_back(nd);
    }
    eng.apply_jump(c + 1, end);
    Eigen::Vector3cd diff = end.col(0) - s[c + 1];
    defect = std::max(defect, d.cwiseProduct(diff.cwiseAbs()).maxCoeff());
  }
  edge_node(C);
  out.continuity = smax > 0.0 ? defect / smax : 0.0;
  return out;
}

}  // namespace

int counting_threshold(const Measure& p, const Measure& q, int xi, double c_pi) {
  check_xi(xi);
  if (!(c_pi > 0.0)) throw DomainError("C_pi must be positive");
  double growth = std::exp(3.0 * (3.0 * norm_v(q) + norm_v(p)));
  double n;
  if (xi == 1) {
    double bound = 2.25 * c_pi * growth;  // (2N+1) pi > bound
    n = std::floor((bound / kPi - 1.0) / 2.0) + 1.0;
  } else {
    double bound = std::max({4.5 * c_pi * growth, 2.0 * std::log(c_pi / 2.0), 2.0 * std::sqrt(2.0) * std::log(c_pi / 4.0)});
    n = std::floor(bound / (2.0 * kPi)) + 1.0;  // 2N pi > bound
  }
  if (!std::isfinite(n) || n > 1e8) throw NumericError("threshold out of range; use scan mode");
  return static_cast<int>(std::max(1.0, n));
}

KInterval localize(int xi, int n, double radius) {
  check_xi(xi);
  double c = (2.0 * n + xi - 1) * kPi;
  return {c - radius, c + radius, c};
}

int count_zeros_lambda(const Measure& p, const Measure& q, int xi, Complex center, double radius,
                       const SpectrumConfig& cfg) {
  check_xi(xi);
  if (!(radius > 0.0)) throw DomainError("contour radius must be positive");
  auto make = [center](double r) {
    return [center, r](double t) { return center + std::polar(r, 2.0 * kPi * t); };
  };
  return winding_with_retry(p, q, xi, radius, make, cfg);
}

int count_zeros_disc(const Measure& p, const Measure& q, int xi, double center_k, double radius_k,
                     const SpectrumConfig& cfg) {
  check_xi(xi);
  if (!(radius_k > 0.0)) throw DomainError("contour radius must be positive");
  if (center_k == 0.0) return count_zeros_lambda(p, q, xi, 0.0, kcube(radius_k), cfg);
  auto make = [center_k](double r) {
    return [center_k, r](double t) {
      Complex k = center_k + std::polar(r, 2.0 * kPi * t);
      return k * k * k;
    };
  };
  return winding_with_retry(p, q, xi, radius_k, make, cfg);
}

double refine_root(const Measure& p, const Measure& q, int xi, double k_lo, double k_hi, const SpectrumConfig& cfg) {
  check_xi(xi);
  const SolverConfig& sc = cfg.solver;
  double flo = real_char(p, q, xi, kcube(k_lo), sc);
  double fhi = real_char(p, q, xi, kcube(k_hi), sc);
  if (flo == 0.0) return k_lo;
  if (fhi == 0.0) return k_hi;
  if ((flo < 0) == (fhi < 0)) throw DomainError("refine_root: bracket holds no sign change");
  double a = k_lo, b = k_hi;
  while (b - a > cfg.k_tol * std::max(1.0, std::max(std::abs(a), std::abs(b)))) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    double fm = real_char(p, q, xi, kcube(m), sc);
    if (fm == 0.0) return m;
    if ((fm < 0) == (flo < 0)) {
      a = m;
      flo = fm;
    } else {
      b = m;
    }
  }
  double lam = newton_polish(p, q, xi, kcube(0.5 * (a + b)), kcube(a), kcube(b), sc);
  return std::cbrt(lam);
}

EigenfunctionResult eigenfunction(const Measure& p, const Measure& q, int xi, double lambda,
                                  const SpectrumConfig& cfg) {
  check_xi(xi);
  const double K = k_scale(lambda);
  EigenfunctionResult res;

  // boundary matrix in natural scaling: case selection and rank test
  auto n1 = fundamental_matrix(p, q, lambda, 1.0, cfg.solver).m;
  double xi_env = xi_bound(1.0, lambda);
  Eigen::Matrix2cd m;
  m << n1(0, 0), n1(0, 1), n1(1, 0), n1(1, 1) + sign_of(xi);
  Eigen::Matrix2d scaled;
  scaled << std::abs(m(0, 0)), std::abs(m(0, 1)) * K, std::abs(m(1, 0)) / K, std::abs(m(1, 1));
  scaled /= xi_env;
  double best = -1.0;
  for (int c = 0; c < 4; ++c) {
    double v = scaled(c / 2, c % 2);
    if (v > best) {
      best = v;
      res.eig_case = c + 1;
    }
  }
  res.g_mult = best < 1e-8 ? 2 : 1;

  detail::Engine eng(p, q, lambda, cfg.solver);
  const int C = eng.cells();
  const int dim = 3 * (C + 1);
  Eigen::Vector3d d(1.0, 1.0 / K, 1.0 / (K * K));
  Eigen::Vector3d dinv(1.0, K, K * K);

  std::vector<Eigen::Matrix3cd> blocks(C);
  parallel_for(static_cast<std::size_t>(C), [&](std::size_t c) {
    Eigen::MatrixXcd t = eng.transfer(static_cast<int>(c));
    eng.apply_jump(static_cast<int>(c) + 1, t);
    blocks[c] = d.asDiagonal() * Eigen::Matrix3cd(t) * dinv.asDiagonal();
  });

  using SpMat = Eigen::SparseMatrix<Complex>;
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(C) * 12 + 6);
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < 3; ++i) {
      trip.emplace_back(3 * c + i, 3 * (c + 1) + i, 1.0);
      for (int j = 0; j < 3; ++j)
        if (blocks[c](i, j) != Complex(0.0)) trip.emplace_back(3 * c + i, 3 * c + j, -blocks[c](i, j));
    }
  }
  const int r0 = 3 * C;
  const double sigma = xi == 1 ? 1.0 : -1.0;
  trip.emplace_back(r0, 3 * C, 1.0);                 // y(1) = 0
  trip.emplace_back(r0 + 1, 3 * C + 1, 1.0);         // y'(1) = sigma y'(0)
  trip.emplace_back(r0 + 1, 1, -sigma);
  trip.emplace_back(r0 + 2, 2, 1.0);                 // w(0-) = 0
  Complex j0 = eng.jump_coefficient(0);
  if (j0 != Complex(0.0)) trip.emplace_back(r0 + 2, 0, -j0 / (K * K));
  SpMat a(dim, dim);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();

  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    // an exactly singular system: shift slightly off the root
    SpMat shift(dim, dim);
    shift.setIdentity();
    a += shift * Complex(1e-14);
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw NumericError("eigenfunction: shooting system factorization failed");
  }

  // block inverse iteration on a two-dimensional subspace
  Eigen::MatrixXcd x(dim, 2);
  for (int i = 0; i < dim; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = Complex(std::cos(0.7 * i), std::sin(1.3 * i));
  }
  for (int it = 0; it < 4; ++it) {
    x = lu.solve(x);
    if (lu.info() != Eigen::Success || !x.allFinite()) throw NumericError("eigenfunction: inverse iteration failed");
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(x);
    x = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, 2);
  }
  Eigen::MatrixXcd ax = a * x;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ax, Eigen::ComputeFullV);
  Eigen::MatrixXcd v = svd.matrixV();
  // singular values come sorted descending; the last is the null direction
  Eigen::MatrixXcd null = x * v;

  auto to_states = [&](const Eigen::VectorXcd& col) {
    std::vector<Eigen::Vector3cd> s(C + 1);
    for (int e = 0; e <= C; ++e) s[e] = dinv.asDiagonal() * Eigen::Vector3cd(col.segment(3 * e, 3));
    return s;
  };
  auto finish = [&](const Eigen::VectorXcd& col, double& cont) {
    ShootingData sd = build_shooting_path(eng, to_states(col), K);
    normalize_path(sd.path, K);
    cont = sd.continuity;
    return sd.path;
  };
  double cont1 = 0.0;
  res.E = finish(null.col(1), cont1);
  res.continuity_defect = cont1;
  res.a = res.E.nodes.front().y;
  res.b = res.E.nodes.front().yp;
  res.bc_residual = bc_residual(res.E, xi);
  res.norm_residual = std::abs(requadrature_norm(res.E) - 1.0);
  if (res.g_mult == 2) {
    double cont2 = 0.0;
    res.E2 = finish(null.col(0), cont2);
    res.continuity_defect = std::max(cont1, cont2);
    res.bc_residual = std::max(res.bc_residual, bc_residual(*res.E2, xi));
  }
  return res;
}

Complex rayleigh_quotient(const Measure& p, const Measure& q, const SolutionPath& E) {
  const Complex I(0.0, 1.0);
  Complex norm2 = 0.0, acc = 0.0;
  for (const auto& nd : E.nodes) {
    if (nd.weight == 0.0) continue;
    double e2 = std::norm(nd.y);
    norm2 += nd.weight * e2;
    // -i w conj(E') + 2i q conj(E) E' + |E|^2 (i q' + p')
    acc += nd.weight * (-I * nd.w * std::conj(nd.yp) + 2.0 * I * q.eval(nd.x) * std::conj(nd.y) * nd.yp +
                        e2 * (I * q.density_at(nd.x) + p.density_at(nd.x)));
  }
  auto at = [&](double x) { return E.state(x)(0); };
  for (const auto& a : q.atoms()) acc += I * a.w * std::norm(at(a.x));
  for (const auto& a : p.atoms()) acc += a.w * std::norm(at(a.x));
  const PathNode& n0 = E.nodes.front();
  const PathNode& n1 = E.nodes.back();
  acc += I * (std::conj(n1.y) * n1.w - std::conj(n0.y) * n0.w_left);
  return acc / norm2;
}

SolutionPath combination_path(const Measure& p, const Measure& q, double lambda, Complex a, Complex b,
                              const SolverConfig& cfg) {
  SolutionPath path = solve_picard(p, q, lambda, {a, b, 0.0}, cfg);
  normalize_path(path, k_scale(lambda));
  return path;
}

namespace {

void attach(Eigenpair& ep, const Measure& p, const Measure& q, const SpectrumConfig& cfg) {
  if (!cfg.eigenfunctions) return;
  auto ef = eigenfunction(p, q, ep.xi, ep.lambda, cfg);
  ep.a = ef.a;
  ep.b = ef.b;
  ep.eig_case = ef.eig_case;
  ep.g_mult = ef.g_mult;
  ep.E = std::move(ef.E);
  ep.E2 = std::move(ef.E2);
  ep.bc_residual = ef.bc_residual;
  ep.norm_residual = ef.norm_residual;
  ep.continuity_defect = ef.continuity_defect;
  ep.imag_residue = std::abs(rayleigh_quotient(p, q, ep.E).imag());
  if (ep.g_mult == 2) ep.a_simple = false;
}

Eigenpair make_pair(int xi, int n, double k) {
  Eigenpair ep;
  ep.xi = xi;
  ep.n = n;
  ep.k = k;
  ep.lambda = kcube(k);
  return ep;
}

// Root in a tail disc (c - r, c + r).
Eigenpair tail_pair(const Measure& p, const Measure& q, int xi, int n, const SpectrumConfig& cfg) {
  KInterval iv = localize(xi, n, cfg.disc_radius);
  auto roots = scan_roots(p, q, xi, iv.lo, iv.hi, (iv.hi - iv.lo) / 16.0, false, cfg);
  int count = -1;
  if (roots.size() != 1 || cfg.check_simplicity) count = count_zeros_disc(p, q, xi, iv.center, cfg.disc_radius, cfg);
  if (roots.empty()) {
    if (count == 0) throw TrackingError("no eigenvalue in the disc |k - " + std::to_string(iv.center) + "| < " +
                                        std::to_string(cfg.disc_radius) + " (n = " + std::to_string(n) + ")");
    roots = scan_roots(p, q, xi, iv.lo, iv.hi, (iv.hi - iv.lo) / 256.0, true, cfg);
    if (roots.empty())
      throw TrackingError("argument principle finds " + std::to_string(count) + " zero(s) near n = " +
                          std::to_string(n) + " but none on the real axis");
  }
  // the root closest to the disc center when the disc holds a cluster
  auto it = std::min_element(roots.begin(), roots.end(), [&](const Root& a, const Root& b) {
    return std::abs(a.k - iv.center) < std::abs(b.k - iv.center);
  });
  Eigenpair ep = make_pair(xi, n, it->k);
  ep.a_simple = it->sign_change && it->multiplicity == 1 && roots.size() == 1 && (count < 0 || count == 1);
  return ep;
}

struct CentralBlock {
  int m = 0;
  std::vector<Eigenpair> pairs;  // indexed, sorted by lambda
};

CentralBlock central_block(const Measure& p, const Measure& q, int xi, int m, const SpectrumConfig& cfg) {
  double radius = xi == 1 ? (2.0 * m + 1) * kPi : 2.0 * m * kPi;
  auto roots = scan_roots(p, q, xi, -radius, radius, cfg.scan_step, true, cfg);
  if (cfg.verify_count) {
    int count = count_zeros_lambda(p, q, xi, 0.0, kcube(radius), cfg);
    if (count != total_multiplicity(roots)) {
      roots = scan_roots(p, q, xi, -radius, radius, cfg.scan_step / 8.0, true, cfg);
      if (count != total_multiplicity(roots))
        throw InconsistencyError("central disc |k| < " + std::to_string(radius) + ": argument principle counts " +
                                 std::to_string(count) + ", real scan finds " +
                                 std::to_string(total_multiplicity(roots)));
    }
  }
  // anchor n = 0 on the zero-potential indexing
  double acc = 0.0;
  int slot = 0;
  for (const auto& r : roots) {
    for (int j = 0; j < r.multiplicity; ++j, ++slot) acc += (r.k - (xi - 1) * kPi) / (2.0 * kPi) - slot;
  }
  int offset = slot > 0 ? static_cast<int>(std::lround(acc / slot)) : 0;

  CentralBlock blk;
  blk.m = m;
  slot = 0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const Root& r = roots[i];
    for (int j = 0; j < r.multiplicity; ++j, ++slot) {
      Eigenpair ep = make_pair(xi, offset + slot, r.k);
      ep.a_simple = r.sign_change && r.multiplicity == 1;
      blk.pairs.push_back(ep);
    }
  }
  return blk;
}

// Small lambda disc around a central root separating it from its neighbours.
bool simple_in_block(const Measure& p, const Measure& q, const CentralBlock& blk, std::size_t i,
                     const SpectrumConfig& cfg) {
  const Eigenpair& ep = blk.pairs[i];
  double k = ep.k;
  double rad = std::abs(kcube(std::abs(k) + cfg.disc_radius) - kcube(std::abs(k)));
  for (std::size_t j = 0; j < blk.pairs.size(); ++j)
    if (j != i) rad = std::min(rad, 0.45 * std::abs(blk.pairs[j].lambda - ep.lambda));
  if (!(rad > 0.0)) return false;
  return count_zeros_lambda(p, q, ep.xi, ep.lambda, rad, cfg) == 1;
}

int block_size_for(int xi, int n) { return xi == 1 ? std::max(1, std::abs(n)) : std::max(1, n >= 0 ? n + 1 : -n); }

}  // namespace

std::vector<Eigenpair> spectrum_scan(const Measure& p, const Measure& q, int xi, int n_min, int n_max,
                                     const SpectrumConfig& cfg) {
  check_xi(xi);
  if (n_min > n_max) throw DomainError("spectrum_scan: empty index range");
  std::vector<int> central, tails;
  for (int n = n_min; n <= n_max; ++n) (block_size_for(xi, n) <= cfg.central_max ? central : tails).push_back(n);

  std::vector<Eigenpair> out;
  if (!central.empty()) {
    int m = 1;
    for (int n : central) m = std::max(m, block_size_for(xi, n));
    CentralBlock blk = central_block(p, q, xi, m, cfg);
    std::vector<std::size_t> picked;
    for (int n : central) {
      auto it = std::find_if(blk.pairs.begin(), blk.pairs.end(), [n](const Eigenpair& e) { return e.n == n; });
      if (it == blk.pairs.end())
        throw TrackingError("index n = " + std::to_string(n) + " not present in the central block");
      picked.push_back(static_cast<std::size_t>(it - blk.pairs.begin()));
    }
    std::vector<Eigenpair> sel(picked.size());
    parallel_for(picked.size(), [&](std::size_t i) {
      Eigenpair ep = blk.pairs[picked[i]];
      if (cfg.check_simplicity && ep.a_simple) ep.a_simple = simple_in_block(p, q, blk, picked[i], cfg);
      attach(ep, p, q, cfg);
      sel[i] = std::move(ep);
    });
    out.insert(out.end(), std::make_move_iterator(sel.begin()), std::make_move_iterator(sel.end()));
  }
  std::vector<Eigenpair> tail(tails.size());
  parallel_for(tails.size(), [&](std::size_t i) {
    Eigenpair ep = tail_pair(p, q, xi, tails[i], cfg);
    attach(ep, p, q, cfg);
    tail[i] = std::move(ep);
  });
  out.insert(out.end(), std::make_move_iterator(tail.begin()), std::make_move_iterator(tail.end()));
  std::sort(out.begin(), out.end(), [](const Eigenpair& a, const Eigenpair& b) { return a.n < b.n; });
  return out;
}

Eigenpair find_eigenvalue(const Measure& p, const Measure& q, int xi, int n, const SpectrumConfig& cfg) {
  return spectrum_scan(p, q, xi, n, n, cfg).front();
}

std::string spectrum_csv_rows(const std::vector<Eigenpair>& pairs) {
  std::string out;
  char buf[256];
  for (const auto& e : pairs) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%d,%d,%.6e,%.6e\n", e.xi, e.n, e.lambda, e.k,
                  e.a_simple ? 1 : 0, e.g_mult, e.bc_residual, e.norm_residual);
    out += buf;
  }
  return out;
}

}  // namespace stieltjes
