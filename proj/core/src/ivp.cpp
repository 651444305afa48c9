#include "stieltjes/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "engine.hpp"

namespace stieltjes {

namespace {

const Complex kI(0.0, 1.0);
const Complex kOmega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

SolutionPath to_path(const detail::Engine& eng, const detail::MultiPath& mp, int col) {
  SolutionPath path;
  path.gauss_nodes = mp.g;
  path.nodes.reserve(mp.x.size());
  int e = 0;
  for (std::size_t i = 0; i < mp.x.size(); ++i) {
    PathNode nd;
    nd.x = mp.x[i];
    nd.y = mp.state[i](0, col);
    nd.yp = mp.state[i](1, col);
    nd.w = mp.state[i](2, col);
    nd.w_left = mp.w_left[i](col);
    nd.weight = mp.weight[i];
    if (mp.is_edge[i]) {
      nd.is_atom = eng.has_atom(e);
      if (nd.is_atom) path.jumps.push_back({nd.x, nd.w - nd.w_left});
      ++e;
    }
    path.nodes.push_back(nd);
  }
  return path;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Re-runs `solve(refine)` on halved cells until consecutive end states agree.
template <class F>
auto with_verify(const SolverConfig& cfg, F solve) {
  auto cur = solve(1.0);
  if (!cfg.verify) return cur;
  double refine = 1.0;
  for (int round = 0; round < 5; ++round) {
    refine *= 2.0;
    auto next = solve(refine);
    Eigen::MatrixXcd a = next.first, b = cur.first;
    double scale = std::max(1.0, max_abs(a));
    cur = std::move(next);
    if (max_abs(a - b) <= std::max(10.0 * cfg.tolerance, 1e-12) * scale) return cur;
  }
  throw NumericError("mesh refinement did not settle in verify mode");
}

Complex phi1(Complex z) {
  if (std::abs(z) < 0.5) {
    Complex term = 1.0, sum = 1.0;
    for (int n = 2; n < 30; ++n) {
      term *= z / static_cast<double>(n);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

// divided differences of exp(r L)
Complex dd2(Complex a, Complex b, double L) { return L * std::exp(b * L) * phi1((a - b) * L); }

Complex dd3(Complex a, Complex b, Complex c, double L) {
  double dab = std::abs(a - b), dbc = std::abs(b - c), dac = std::abs(a - c);
  if (std::max({dab, dbc, dac}) * L < 0.5) {
    Complex al = (a - c) * L, be = (b - c) * L;
    // sum_n h_n(al, be) / (n+2)!
    Complex h = 1.0, bp = 1.0, sum = 0.0;
    double fact = 2.0;
    for (int n = 0; n < 40; ++n) {
      if (n > 0) {
        bp *= be;
        h = al * h + bp;
        fact *= (n + 2);
      }
      sum += h / fact;
    }
    return std::exp(c * L) * L * L * sum;
  }
  // split along the widest pair
  if (dab >= dbc && dab >= dac) return (dd2(a, c, L) - dd2(c, b, L)) / (a - b);
  if (dbc >= dac) return (dd2(b, a, L) - dd2(a, c, L)) / (b - c);
  return (dd2(a, b, L) - dd2(b, c, L)) / (a - c);
}

std::array<Complex, 3> cubic_roots(double qc, Complex lambda) {
  // r^3 + P r + Q = 0
  Complex P = 2.0 * qc, Q = kI * lambda;
  std::array<Complex, 3> r{};
  if (P == 0.0 && Q == 0.0) return r;
  Complex disc = std::sqrt(Q * Q / 4.0 + P * P * P / 27.0);
  Complex u3 = -Q / 2.0 + disc;
  if (std::abs(-Q / 2.0 - disc) > std::abs(u3)) u3 = -Q / 2.0 - disc;
  Complex u = std::pow(u3, 1.0 / 3.0);
  Complex wj = 1.0;
  for (int j = 0; j < 3; ++j) {
    Complex uj = u * wj;
    r[j] = uj - P / (3.0 * uj);
    wj *= kOmega;
  }
  double scale = std::abs(P) + std::pow(std::abs(Q), 1.0 / 3.0);
  for (auto& x : r) {
    for (int it = 0; it < 3; ++it) {
      Complex f = x * x * x + P * x + Q, df = 3.0 * x * x + P;
      if (df == 0.0) break;
      x -= f / df;
    }
    Complex f = x * x * x + P * x + Q;
    if (std::abs(f) > 1e-8 * (1.0 + scale * scale * scale))
      throw DegeneracyError("characteristic root polish failed");
  }
  // snap numerically coincident roots so the confluent series branch is used
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(r[i] - r[j]) <= 1e-12 * (1.0 + std::abs(r[i]))) {
        Complex mid = 0.5 * (r[i] + r[j]);
        r[i] = r[j] = mid;
      }
  return r;
}

}  // namespace

int SolutionPath::find(double x) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), x, [](const PathNode& n, double v) { return n.x < v; });
  while (it != nodes.end() && it->x == x) {
    if (gauss_nodes == 0 || it->weight == 0.0) return static_cast<int>(it - nodes.begin());
    ++it;
  }
  return -1;
}

Eigen::Vector3cd SolutionPath::state(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("state: x outside [0,1]");
  int idx = find(x);
  if (idx >= 0) return {nodes[idx].y, nodes[idx].yp, nodes[idx].w};
  if (gauss_nodes == 0) throw DomainError("state: x is not a node of a sampled path");
  const int stride = gauss_nodes + 1;
  const int cells = (static_cast<int>(nodes.size()) - 1) / stride;
  int lo = 0, hi = cells - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (nodes[mid * stride].x <= x)
      lo = mid;
    else
      hi = mid - 1;
  }
  const int base = lo * stride;
  const int npts = gauss_nodes + 2;
  std::vector<double> xs(npts), bw(npts, 1.0);
  for (int i = 0; i < npts; ++i) xs[i] = nodes[base + i].x;
  for (int i = 0; i < npts; ++i)
    for (int j = 0; j < npts; ++j)
      if (i != j) bw[i] /= (xs[i] - xs[j]);
  Complex num_y = 0.0, num_z = 0.0, num_w = 0.0;
  double den = 0.0;
  for (int i = 0; i < npts; ++i) {
    double c = bw[i] / (x - xs[i]);
    const PathNode& nd = nodes[base + i];
    num_y += c * nd.y;
    num_z += c * nd.yp;
    num_w += c * (i == npts - 1 ? nd.w_left : nd.w);
    den += c;
  }
  return {num_y / den, num_z / den, num_w / den};
}

Complex SolutionPath::integrate(const std::function<Complex(const PathNode&)>& f) const {
  Complex s = 0.0;
  for (const auto& nd : nodes)
    if (nd.weight != 0.0) s += nd.weight * f(nd);
  return s;
}

std::vector<double> SolutionPath::edges() const {
  std::vector<double> e;
  for (const auto& nd : nodes)
    if (gauss_nodes == 0 || nd.weight == 0.0) e.push_back(nd.x);
  return e;
}

double FundamentalMatrix::scaled_det_defect() const {
  double a = m.cwiseAbs().maxCoeff();
  double b = adjugate(m).cwiseAbs().maxCoeff();
  return std::abs(det() - 1.0) / std::max(1.0, a * b);
}

Eigen::Matrix3cd adjugate(const Eigen::Matrix3cd& a) {
  Eigen::Matrix3cd c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      // cyclic indices give the signed cofactor directly
      c(j, i) = a(i1, j1) * a(i2, j2) - a(i1, j2) * a(i2, j1);
    }
  return c;
}

Complex cube_root(Complex lambda) {
  if (lambda == 0.0) return 0.0;
  return std::polar(std::cbrt(std::abs(lambda)), std::arg(lambda) / 3.0);
}

SolutionPath solve_picard(const Measure& p, const Measure& q, Complex lambda, const InitialTriple& init,
                          const SolverConfig& cfg) {
  Eigen::MatrixXcd s0 = init.vec();
  auto res = with_verify(cfg, [&](double refine) {
    detail::Engine eng(p, q, lambda, cfg, refine);
    auto mp = detail::run(eng, s0, true);
    SolutionPath path = to_path(eng, mp, 0);
    Eigen::MatrixXcd end = mp.state.back();
    return std::make_pair(end, std::move(path));
  });
  return std::move(res.second);
}

Eigen::Matrix3cd constant_propagator(double qc, Complex lambda, double length) {
  Eigen::Matrix3cd a;
  a << 0, 1, 0, 0, 0, 1, -kI * lambda, -2.0 * qc, 0;
  auto r = cubic_roots(qc, lambda);
  std::sort(r.begin(), r.end(), [](Complex u, Complex v) { return u.real() > v.real(); });
  const Eigen::Matrix3cd id = Eigen::Matrix3cd::Identity();
  Eigen::Matrix3cd p1 = a - r[0] * id;
  Eigen::Matrix3cd p2 = p1 * (a - r[1] * id);
  return std::exp(r[0] * length) * id + dd2(r[0], r[1], length) * p1 + dd3(r[0], r[1], r[2], length) * p2;
}

SolutionPath solve_transfer(const Measure& p, const Measure& q, Complex lambda, const InitialTriple& init,
                            std::vector<double> samples) {
  if (!p.purely_atomic() || !q.purely_atomic())
    throw DomainError("solve_transfer needs purely atomic p and q");
  if (samples.empty())
    for (int i = 0; i <= 64; ++i) samples.push_back(i / 64.0);
  for (double x : samples)
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("sample outside [0,1]");
  for (const auto* m : {&p, &q})
    for (const auto& a : m->atoms()) samples.push_back(a.x);
  samples.push_back(0.0);
  samples.push_back(1.0);
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

  SolutionPath path;
  Eigen::Vector3cd s = init.vec();
  double qc = 0.0;
  auto visit = [&](double x) {
    PathNode nd;
    nd.x = x;
    nd.w_left = s(2);
    double dq = q.atom_at(x), dp = p.atom_at(x);
    if (dq != 0.0 || dp != 0.0) {
      Complex dw = -s(0) * Complex(dq, -dp);
      s(2) += dw;
      nd.is_atom = true;
      path.jumps.push_back({x, dw});
    }
    qc += dq;
    nd.y = s(0);
    nd.yp = s(1);
    nd.w = s(2);
    path.nodes.push_back(nd);
  };
  visit(samples[0]);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    s = constant_propagator(qc, lambda, samples[i] - samples[i - 1]) * s;
    if (!s.allFinite()) throw NumericError("overflow in transfer propagation");
    visit(samples[i]);
  }
  return path;
}

FundamentalMatrix zero_potential(double x, Complex lambda) {
  FundamentalMatrix fm;
  fm.x = x;
  Complex k = cube_root(lambda);
  Complex y1, y2, y3;
  if (std::abs(k) * std::abs(x) <= 3.0) {
    Complex a = -kI * lambda * x * x * x;
    Complex t1 = 1.0, t2 = x, t3 = 0.5 * x * x;
    y1 = t1;
    y2 = t2;
    y3 = t3;
    for (int m = 1; m < 60; ++m) {
      double n = 3.0 * m;
      t1 *= a / ((n - 2.0) * (n - 1.0) * n);
      t2 *= a / ((n - 1.0) * n * (n + 1.0));
      t3 *= a / (n * (n + 1.0) * (n + 2.0));
      y1 += t1;
      y2 += t2;
      y3 += t3;
      if (std::abs(t1) + std::abs(t2) + std::abs(t3) < 1e-18 * (std::abs(y1) + std::abs(y2) + std::abs(y3))) break;
    }
  } else {
    Complex e0 = std::exp(kI * k * x), e1 = std::exp(kI * kOmega * k * x), e2 = std::exp(kI * kOmega * kOmega * k * x);
    Complex w2 = kOmega * kOmega;
    y1 = (e0 + e1 + e2) / 3.0;
    y2 = (e0 + w2 * e1 + kOmega * e2) / (3.0 * kI * k);
    y3 = (e0 + kOmega * e1 + w2 * e2) / (3.0 * (kI * k) * (kI * k));
  }
  Complex c = -kI * lambda;
  fm.m << y1, y2, y3, c * y3, y1, y2, c * y2, c * y3, y1;
  return fm;
}

std::vector<FundamentalMatrix> fundamental_matrices(const Measure& p, const Measure& q, Complex lambda,
                                                    const std::vector<double>& xs, const SolverConfig& cfg) {
  for (double x : xs)
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("fundamental_matrix: x outside [0,1]");
  SolverConfig c2 = cfg;
  c2.extra_breakpoints.insert(c2.extra_breakpoints.end(), xs.begin(), xs.end());
  auto res = with_verify(c2, [&](double refine) {
    detail::Engine eng(p, q, lambda, c2, refine);
    std::vector<Eigen::Matrix3cd> at_edges;
    std::vector<double> ex;
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(3, 3);
    eng.apply_jump(0, s);
    for (int c = 0; c < eng.cells(); ++c) {
      s = eng.advance(c, s, nullptr);
      eng.apply_jump(c + 1, s);
      ex.push_back(eng.edge(c + 1));
      at_edges.push_back(s);
    }
    std::vector<FundamentalMatrix> out;
    Eigen::MatrixXcd stacked(3, 3 * xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      FundamentalMatrix fm;
      fm.x = xs[i];
      if (xs[i] > 0.0) {
        auto it = std::lower_bound(ex.begin(), ex.end(), xs[i]);
        fm.m = at_edges[it - ex.begin()];
      }
      stacked.middleCols(3 * i, 3) = fm.m;
      out.push_back(fm);
    }
    return std::make_pair(stacked, out);
  });
  return res.second;
}

FundamentalMatrix fundamental_matrix(const Measure& p, const Measure& q, Complex lambda, double x,
                                     const SolverConfig& cfg) {
  return fundamental_matrices(p, q, lambda, {x}, cfg).front();
}

FundamentalPath fundamental_path(const Measure& p, const Measure& q, Complex lambda, const SolverConfig& cfg) {
  detail::Engine eng(p, q, lambda, cfg);
  auto mp = detail::run(eng, Eigen::MatrixXcd::Identity(3, 3), true);
  FundamentalPath fp;
  fp.gauss_nodes = mp.g;
  fp.x = mp.x;
  fp.weight = mp.weight;
  fp.n.reserve(mp.state.size());
  for (const auto& s : mp.state) fp.n.push_back(s);
  return fp;
}

Eigen::MatrixXcd end_states(const Measure& p, const Measure& q, Complex lambda, const Eigen::MatrixXcd& init,
                            const SolverConfig& cfg) {
  auto res = with_verify(cfg, [&](double refine) {
    detail::Engine eng(p, q, lambda, cfg, refine);
    Eigen::MatrixXcd s = detail::run_end(eng, init);
    return std::make_pair(s, s);
  });
  return res.second;
}

SolutionPath solve_inhomogeneous(const Measure& p, const Measure& q, Complex lambda, const InitialTriple& init,
                                 const std::function<Complex(double)>& h, const Measure& nu,
                                 const SolverConfig& cfg) {
  SolverConfig c2 = cfg;
  auto nb = nu.breakpoints();
  c2.extra_breakpoints.insert(c2.extra_breakpoints.end(), nb.begin(), nb.end());
  FundamentalPath fp = fundamental_path(p, q, lambda, c2);
  const int g = fp.gauss_nodes;
  const auto& rule = detail::cell_rule(g);
  const std::size_t stride = g + 1;

  auto kernel = [&](std::size_t i) -> Eigen::Vector3cd {
    return adjugate(fp.n[i]).col(2) * h(fp.x[i]);
  };
  SolutionPath path;
  path.gauss_nodes = g;
  Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
  const Eigen::Vector3cd v0 = init.vec();
  auto emit = [&](std::size_t i, const Eigen::Vector3cd& before, bool edge) {
    PathNode nd;
    nd.x = fp.x[i];
    nd.weight = fp.weight[i];
    Eigen::Vector3cd st = fp.n[i] * (v0 + acc);
    nd.y = st(0);
    nd.yp = st(1);
    nd.w = st(2);
    nd.w_left = nd.w;
    if (edge) {
      double x = nd.x;
      Complex coef = Complex(-q.atom_at(x), p.atom_at(x));
      Eigen::Matrix3cd left = fp.n[i];
      left.row(2) -= coef * left.row(0);
      Eigen::Vector3cd stl = left * (v0 + before);
      if (x == 0.0) stl = v0;
      nd.w_left = stl(2);
      nd.is_atom = coef != 0.0 || nu.atom_at(x) != 0.0;
      if (nd.is_atom) path.jumps.push_back({x, nd.w - nd.w_left});
    }
    path.nodes.push_back(nd);
  };

  const std::size_t cells = (fp.x.size() - 1) / stride;
  {
    Eigen::Vector3cd before = acc;
    acc += kernel(0) * nu.atom_at(0.0);
    emit(0, before, true);
  }
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t base = c * stride;
    double a = fp.x[base], b = fp.x[base + stride];
    double hc = b - a;
    std::vector<Eigen::Vector3cd> f(g);
    for (int j = 0; j < g; ++j) f[j] = kernel(base + 1 + j) * nu.density_at(fp.x[base + 1 + j]);
    const Eigen::Vector3cd start = acc;
    for (int i = 0; i < g; ++i) {
      Eigen::Vector3cd part = Eigen::Vector3cd::Zero();
      for (int j = 0; j < g; ++j) part += rule.q(i, j) * f[j];
      acc = start + hc * part;
      emit(base + 1 + i, acc, false);
    }
    Eigen::Vector3cd full = Eigen::Vector3cd::Zero();
    for (int j = 0; j < g; ++j) full += rule.omega(j) * f[j];
    acc = start + hc * full;
    Eigen::Vector3cd before = acc;
    acc += kernel(base + stride) * nu.atom_at(b);
    emit(base + stride, before, true);
  }
  return path;
}

double xi_bound(double x, Complex lambda) {
  Complex k = cube_root(lambda);
  double s = std::abs((k).imag()) + std::abs((kOmega * k).imag()) + std::abs((kOmega * kOmega * k).imag());
  return std::exp(0.5 * s * x);
}

std::string path_csv_rows(const SolutionPath& path) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& nd : path.nodes)
    os << nd.x << ',' << nd.y.real() << ',' << nd.y.imag() << ',' << nd.yp.real() << ',' << nd.yp.imag() << ','
       << nd.w.real() << ',' << nd.w.imag() << ',' << (nd.is_atom ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace stieltjes
