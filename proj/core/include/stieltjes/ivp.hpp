#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "stieltjes/errors.hpp"
#include "stieltjes/measure.hpp"

namespace stieltjes {

// (y(0), y'(0), w(0)) with w the generalized derivative of y'.
struct InitialTriple {
  Complex y0{0.0};
  Complex z0{0.0};
  Complex w0{0.0};
  Eigen::Vector3cd vec() const { return {y0, z0, w0}; }
};

struct SolverConfig {
  int base_cells = 16;        // minimal number of uniform cells
  double tolerance = 1e-14;   // relative sup-norm change stopping the iteration
  int max_iterations = 80;    // per cell
  int nodes_per_cell = 10;    // Gauss collocation nodes per cell
  double max_step = 0.5;      // bound on (local wavenumber) * cell length
  bool verify = false;        // halve cells until two resolutions agree
  std::vector<double> extra_breakpoints;
};

struct PathNode {
  double x = 0.0;
  Complex y, yp, w;   // w right-continuous
  Complex w_left;     // w(x-); equals w away from atoms
  bool is_atom = false;
  double weight = 0.0;  // dx quadrature weight (interior nodes only)
};

struct Jump {
  double x = 0.0;
  Complex dw;
};

// Sampled solution. Picard paths are laid out cell by cell: an edge node
// followed by `gauss_nodes` interior nodes, ending with the edge at x = 1.
// Transfer paths are plain sample lists with gauss_nodes == 0.
struct SolutionPath {
  std::vector<PathNode> nodes;
  std::vector<Jump> jumps;
  int gauss_nodes = 0;

  const PathNode& back() const { return nodes.back(); }
  // Index of the edge node at exactly x, or -1.
  int find(double x) const;
  // (y, y', w) at x, w right-continuous; interpolated inside cells.
  Eigen::Vector3cd state(double x) const;
  Complex integrate(const std::function<Complex(const PathNode&)>& f) const;
  std::vector<double> edges() const;
};

struct FundamentalMatrix {
  double x = 0.0;
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Identity();

  Complex det() const { return m.determinant(); }
  // |det - 1| / (||N|| ||adj N||): rounding-normalized determinant defect.
  double scaled_det_defect() const;
};

// N at every node of a collocation path; used by the variation formulas.
struct FundamentalPath {
  int gauss_nodes = 0;
  std::vector<double> x;
  std::vector<double> weight;
  std::vector<Eigen::Matrix3cd> n;
};

Eigen::Matrix3cd adjugate(const Eigen::Matrix3cd& a);
// Principal cube root.
Complex cube_root(Complex lambda);

SolutionPath solve_picard(const Measure& p, const Measure& q, Complex lambda, const InitialTriple& init,
                          const SolverConfig& cfg = {});

// Exact propagation for purely atomic p and q. Output nodes are the union of
// `samples`, the atom locations and {0,1}; empty samples means 65 uniform points.
SolutionPath solve_transfer(const Measure& p, const Measure& q, Complex lambda, const InitialTriple& init,
                            std::vector<double> samples = {});

// exp(A L) for A = [[0,1,0],[0,0,1],[-i lambda,-2 qc,0]].
Eigen::Matrix3cd constant_propagator(double qc, Complex lambda, double length);

FundamentalMatrix zero_potential(double x, Complex lambda);

FundamentalMatrix fundamental_matrix(const Measure& p, const Measure& q, Complex lambda, double x,
                                     const SolverConfig& cfg = {});
// N at several points from one sweep (points become mesh edges).
std::vector<FundamentalMatrix> fundamental_matrices(const Measure& p, const Measure& q, Complex lambda,
                                                    const std::vector<double>& xs, const SolverConfig& cfg = {});
FundamentalPath fundamental_path(const Measure& p, const Measure& q, Complex lambda, const SolverConfig& cfg = {});

// State at x = 1 only (right value), one column per initial vector.
Eigen::MatrixXcd end_states(const Measure& p, const Measure& q, Complex lambda, const Eigen::MatrixXcd& init,
                            const SolverConfig& cfg = {});

// Solution of the equation with extra right side i h dnu, by variation of
// constants on the Picard path of the homogeneous problem.
SolutionPath solve_inhomogeneous(const Measure& p, const Measure& q, Complex lambda, const InitialTriple& init,
                                 const std::function<Complex(double)>& h, const Measure& nu,
                                 const SolverConfig& cfg = {});

// exp((|Im k/2| + |Im wk/2| + |Im w^2 k/2|) x)
double xi_bound(double x, Complex lambda);

// CSV rows x,re_y,im_y,re_yp,im_yp,re_w,im_w,is_atom (no header).
std::string path_csv_rows(const SolutionPath& path);

}  // namespace stieltjes
