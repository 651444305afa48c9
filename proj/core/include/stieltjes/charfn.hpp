#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stieltjes/ivp.hpp"

namespace stieltjes {

// (y1(1), y2(1); y1'(1), y2'(1) + (-1)^xi)
struct BoundaryMatrix {
  int xi = 1;
  Complex lambda;
  Eigen::Matrix2cd entries;

  Complex det() const { return entries.determinant(); }
};

struct CharValue {
  Complex lambda;
  int xi = 1;
  Complex value;      // conj(y1(1, conj lambda)) + (-1)^xi y1(1, lambda)
  Complex det_value;  // det of the boundary matrix
  Complex Y1, Z1;     // y1(1, lambda) = Y1 + i Z1
  double mismatch = 0.0;  // |value - det_value| / scale
};

struct RealSplit {
  double Y1 = 0.0;
  double Z1 = 0.0;
  // max(|Re det M_1|, |Im det M_2|) relative to the cancellation scale
  double imag_residue = 0.0;
};

// Relative tolerance of the det/conjugate cross-check.
inline constexpr double kCharCrossCheckTol = 1e-8;

void check_xi(int xi);

BoundaryMatrix boundary_matrix(const Measure& p, const Measure& q, Complex lambda, int xi,
                               const SolverConfig& cfg = {});

// Throws ConsistencyError when the two evaluations disagree.
CharValue delta(const Measure& p, const Measure& q, Complex lambda, int xi, const SolverConfig& cfg = {});

// Conjugate form only, no cross-check. One solve for real lambda.
Complex delta_value(const Measure& p, const Measure& q, Complex lambda, int xi, const SolverConfig& cfg = {});

// Y1, Z1 of a real lambda. Delta_1 = -2i Z1, Delta_2 = 2 Y1.
RealSplit real_split(const Measure& p, const Measure& q, double lambda, const SolverConfig& cfg = {});

struct CharScanRow {
  double lambda = 0.0;
  double k = 0.0;  // real cube root
  Complex delta1, delta2;
  double Y1 = 0.0, Z1 = 0.0;
};
// Both characteristic functions on a list of real lambdas, in input order.
std::vector<CharScanRow> char_scan(const Measure& p, const Measure& q, const std::vector<double>& lambdas,
                                   const SolverConfig& cfg = {});

}  // namespace stieltjes
