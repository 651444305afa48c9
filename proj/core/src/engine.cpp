#include "engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace stieltjes::detail {

namespace {

double legendre(int n, double u) {
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = u;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * u * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

CellRule build_cell_rule(int g) {
  const GaussRule& gr = gauss_legendre(g);
  CellRule r;
  r.g = g;
  r.tau.resize(g);
  r.omega.resize(g);
  Eigen::MatrixXd v(g, g), w(g, g);
  for (int i = 0; i < g; ++i) {
    r.tau(i) = gr.nodes[i];
    r.omega(i) = gr.weights[i];
    double u = 2.0 * gr.nodes[i] - 1.0;
    for (int n = 0; n < g; ++n) {
      v(i, n) = legendre(n, u);
      // int_0^tau P_n(2s-1) ds
      w(i, n) = n == 0 ? gr.nodes[i]
                       : (legendre(n + 1, u) - legendre(n - 1, u)) / (2.0 * (2.0 * n + 1.0));
    }
  }
  Eigen::MatrixXd q = w * v.inverse();
  r.q = q.cast<Complex>();
  return r;
}

int piece_index(const Measure& m, double x) {
  const auto& ps = m.pieces();
  auto it = std::upper_bound(ps.begin(), ps.end(), x,
                             [](double v, const PolynomialPiece& p) { return v < p.lo; });
  if (it == ps.begin()) return -1;
  --it;
  return x < it->hi ? static_cast<int>(it - ps.begin()) : -1;
}

}  // namespace

const CellRule& cell_rule(int g) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<CellRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[g];
  if (!slot) slot = std::make_unique<CellRule>(build_cell_rule(g));
  return *slot;
}

Engine::Engine(const Measure& p, const Measure& q, Complex lambda, const SolverConfig& cfg,
               double refine)
    : p_(p), q_(q), lambda_(lambda), cfg_(cfg), rule_(cell_rule(cfg.nodes_per_cell)) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw NumericError("non-finite lambda");
  if (cfg.base_cells < 1 || cfg.nodes_per_cell < 2 || !(cfg.tolerance > 0.0) || cfg.max_iterations < 1 ||
      !(cfg.max_step > 0.0))
    throw DomainError("invalid solver configuration");

  std::vector<double> bps = p.breakpoints();
  auto qb = q.breakpoints();
  bps.insert(bps.end(), qb.begin(), qb.end());
  for (double x : cfg.extra_breakpoints)
    if (x > 0.0 && x < 1.0) bps.push_back(x);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  // local wavenumber scale bounding the Picard contraction in each cell
  double dens = p.max_abs_density() + q.max_abs_density();
  double kd = std::cbrt(std::abs(lambda) + dens);
  double kq = std::sqrt(2.0 * total_variation(q));
  double keff = std::max({kd, kq, 1e-300});
  double hmax = std::min(1.0 / cfg.base_cells, cfg.max_step / keff) / refine;

  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    double u = bps[i], v = bps[i + 1];
    int n = std::max(1, static_cast<int>(std::ceil((v - u) / hmax - 1e-9)));
    for (int j = 0; j < n; ++j) {
      Cell c;
      c.a = j == 0 ? u : u + (v - u) * j / n;
      double b = j + 1 == n ? v : u + (v - u) * (j + 1) / n;
      c.h = b - c.a;
      cells_.push_back(c);
    }
  }

  const int m = cells();
  jump_.assign(m + 1, Complex(0.0));
  atom_.assign(m + 1, 0);
  double qv = 0.0;
  for (int e = 0; e <= m; ++e) {
    double x = edge(e);
    double dq = q.atom_at(x), dp = p.atom_at(x);
    if (dq != 0.0 || dp != 0.0) {
      jump_[e] = Complex(-dq, dp);
      atom_[e] = 1;
    }
    qv += dq;
    if (e == m) break;
    Cell& c = cells_[e];
    double mid = c.a + 0.5 * c.h;
    c.p_piece = piece_index(p, mid);
    c.q_piece = piece_index(q, mid);
    c.q_a = qv;
    if (c.q_piece >= 0) qv += q.pieces()[c.q_piece].mass(c.a, c.a + c.h);
    c.q_b = qv;
  }
}

void Engine::apply_jump(int e, Eigen::MatrixXcd& s) const {
  if (atom_[e]) s.row(2) += jump_[e] * s.row(0);
}

Eigen::MatrixXcd Engine::advance(int c, const Eigen::MatrixXcd& s, Eigen::MatrixXcd* interior) const {
  const Cell& cl = cells_[c];
  const int g = rule_.g;
  const Eigen::Index m = s.cols();
  const double h = cl.h;
  const Complex I(0.0, 1.0);

  Eigen::VectorXcd d(g);
  Eigen::VectorXd qn(g);
  const PolynomialPiece* pp = cl.p_piece >= 0 ? &p_.pieces()[cl.p_piece] : nullptr;
  const PolynomialPiece* qp = cl.q_piece >= 0 ? &q_.pieces()[cl.q_piece] : nullptr;
  for (int i = 0; i < g; ++i) {
    double x = cl.a + h * rule_.tau(i);
    double dq = qp ? qp->density(x) : 0.0;
    double dp = pp ? pp->density(x) : 0.0;
    qn(i) = cl.q_a + (qp ? qp->mass(cl.a, x) : 0.0);
    d(i) = Complex(dq, dp) - I * lambda_;
  }

  const Eigen::RowVectorXcd ya = s.row(0), za = s.row(1), wa = s.row(2);
  const Eigen::MatrixXcd hq = h * rule_.q;
  const Eigen::RowVectorXcd base_w = wa + (2.0 * cl.q_a) * ya;
  const Eigen::VectorXcd m2q = (-2.0 * qn).cast<Complex>();

  Eigen::MatrixXcd y(g, m), w(g, m), z(g, m), ynew(g, m);
  for (int i = 0; i < g; ++i) {
    double t = h * rule_.tau(i);
    y.row(i) = ya + t * za + (0.5 * t * t) * wa;
  }
  Eigen::VectorXd scale(m);
  for (Eigen::Index j = 0; j < m; ++j)
    scale(j) = std::abs(ya(j)) + std::abs(za(j)) * h + std::abs(wa(j)) * h * h;

  auto sweep = [&](const Eigen::MatrixXcd& yin) {
    w.noalias() = hq * (d.asDiagonal() * yin);
    w += m2q.asDiagonal() * yin;
    w.rowwise() += base_w;
    z.noalias() = hq * w;
    z.rowwise() += za;
  };

  bool converged = false;
  double last = 0.0;
  for (int it = 0; it < cfg_.max_iterations; ++it) {
    sweep(y);
    ynew.noalias() = hq * z;
    ynew.rowwise() += ya;
    converged = true;
    last = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      double diff = (ynew.col(j) - y.col(j)).cwiseAbs().maxCoeff();
      double sc = std::max(scale(j), ynew.col(j).cwiseAbs().maxCoeff());
      if (!std::isfinite(diff) || !std::isfinite(sc)) throw NumericError("overflow or NaN in Picard iteration");
      double rel = sc > 0.0 ? diff / sc : 0.0;
      last = std::max(last, rel);
      if (rel > cfg_.tolerance) converged = false;
    }
    y.swap(ynew);
    if (converged) break;
  }
  if (!converged)
    throw IterationLimitError("Picard iteration did not converge in cell starting at x=" + std::to_string(cl.a),
                              last);
  sweep(y);

  Eigen::MatrixXcd out(3, m);
  const Eigen::RowVectorXcd om = rule_.omega.cast<Complex>();
  out.row(0) = ya + h * (om * z);
  out.row(1) = za + h * (om * w);
  out.row(2) = wa - 2.0 * (cl.q_b * out.row(0) - cl.q_a * ya) + h * (om * (d.asDiagonal() * y));
  if (interior) {
    interior->resize(3 * g, m);
    for (int i = 0; i < g; ++i) {
      interior->row(3 * i) = y.row(i);
      interior->row(3 * i + 1) = z.row(i);
      interior->row(3 * i + 2) = w.row(i);
    }
  }
  return out;
}

Eigen::Matrix3cd Engine::transfer(int c) const {
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
  return advance(c, id, nullptr);
}

MultiPath run(const Engine& eng, const Eigen::MatrixXcd& init, bool store) {
  MultiPath mp;
  const int g = eng.rule().g;
  mp.g = g;
  Eigen::MatrixXcd s = init;
  auto push = [&](double x, double wt, bool edge, const Eigen::MatrixXcd& st, const Eigen::RowVectorXcd& wl) {
    mp.x.push_back(x);
    mp.weight.push_back(wt);
    mp.is_edge.push_back(edge);
    mp.state.push_back(st);
    mp.w_left.push_back(wl);
  };
  Eigen::RowVectorXcd wl = s.row(2);
  eng.apply_jump(0, s);
  if (store) {
    std::size_t n = static_cast<std::size_t>(eng.cells()) * (g + 1) + 1;
    mp.x.reserve(n);
    mp.state.reserve(n);
    push(0.0, 0.0, true, s, wl);
  }
  Eigen::MatrixXcd inner;
  for (int c = 0; c < eng.cells(); ++c) {
    s = eng.advance(c, s, store ? &inner : nullptr);
    if (store) {
      const Cell& cl = eng.cell(c);
      for (int i = 0; i < g; ++i)
        push(cl.a + cl.h * eng.rule().tau(i), cl.h * eng.rule().omega(i), false, inner.middleRows(3 * i, 3),
             inner.row(3 * i + 2));
    }
    wl = s.row(2);
    eng.apply_jump(c + 1, s);
    if (store) push(eng.edge(c + 1), 0.0, true, s, wl);
  }
  if (!store) push(1.0, 0.0, true, s, wl);
  return mp;
}

Eigen::MatrixXcd run_end(const Engine& eng, const Eigen::MatrixXcd& init) {
  Eigen::MatrixXcd s = init;
  eng.apply_jump(0, s);
  for (int c = 0; c < eng.cells(); ++c) {
    s = eng.advance(c, s, nullptr);
    eng.apply_jump(c + 1, s);
  }
  return s;
}

}  // namespace stieltjes::detail
