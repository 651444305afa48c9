#pragma once

// Cell-wise fixed-point propagation shared by the solver front ends.

#include <Eigen/Dense>
#include <vector>

#include "stieltjes/ivp.hpp"
#include "stieltjes/measure.hpp"
#include "stieltjes/quadrature.hpp"

namespace stieltjes::detail {

struct CellRule {
  int g = 0;
  Eigen::VectorXd tau;    // nodes on [0,1]
  Eigen::RowVectorXd omega;  // weights
  Eigen::MatrixXcd q;     // q(i,j) = int_0^{tau_i} l_j
};
const CellRule& cell_rule(int g);

struct Cell {
  double a = 0.0, h = 0.0;
  int p_piece = -1, q_piece = -1;
  double q_a = 0.0;  // q(a+)
  double q_b = 0.0;  // q(b-)
};

class Engine {
 public:
  // `refine` divides the maximal cell length (used by verify mode).
  Engine(const Measure& p, const Measure& q, Complex lambda, const SolverConfig& cfg,
         double refine = 1.0);

  int cells() const { return static_cast<int>(cells_.size()); }
  double edge(int e) const { return e < cells() ? cells_[e].a : 1.0; }
  const Cell& cell(int c) const { return cells_[c]; }
  const CellRule& rule() const { return rule_; }
  Complex lambda() const { return lambda_; }

  // -(dq - i dp) at edge e; zero when no atom sits there.
  Complex jump_coefficient(int e) const { return jump_[e]; }
  bool has_atom(int e) const { return atom_[e]; }
  void apply_jump(int e, Eigen::MatrixXcd& s) const;

  // Maps right values at the left edge of cell c (3 x m) to left values at its
  // right edge. If `interior` is given it receives the node states as a
  // (3g x m) block, rows 3i..3i+2 holding (y, y', w) at node i.
  Eigen::MatrixXcd advance(int c, const Eigen::MatrixXcd& s, Eigen::MatrixXcd* interior) const;

  // 3x3 map of cell c (left edge right value -> right edge left value).
  Eigen::Matrix3cd transfer(int c) const;

 private:
  const Measure& p_;
  const Measure& q_;
  Complex lambda_;
  SolverConfig cfg_;
  const CellRule& rule_;
  std::vector<Cell> cells_;
  std::vector<Complex> jump_;
  std::vector<char> atom_;
};

// Multi-column run over the whole mesh.
struct MultiPath {
  int g = 0;
  std::vector<double> x;
  std::vector<double> weight;  // quadrature weight for dx integrals (0 at edges)
  std::vector<char> is_edge;
  std::vector<Eigen::MatrixXcd> state;  // 3 x m, w right-continuous
  std::vector<Eigen::RowVectorXcd> w_left;
};

MultiPath run(const Engine& eng, const Eigen::MatrixXcd& init, bool store);
Eigen::MatrixXcd run_end(const Engine& eng, const Eigen::MatrixXcd& init);

}  // namespace stieltjes::detail
