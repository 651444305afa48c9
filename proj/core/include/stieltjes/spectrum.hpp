#pragma once

#include <numbers>
#include <optional>
#include <vector>

#include "stieltjes/charfn.hpp"
#include "stieltjes/ivp.hpp"

namespace stieltjes {

struct SpectrumConfig {
  double c_pi = 1e4;                        // only sizes the guaranteed tail region
  double disc_radius = std::numbers::pi / 3;  // tail disc radius in k
  double k_tol = 1e-12;                     // bisection width, relative to max(1,|k|)
  double scan_step = std::numbers::pi / 16;  // real-k scan resolution
  int contour_points = 256;                 // initial argument-principle samples
  int central_max = 16;                     // largest |n| enumerated by the central scan
  bool verify_count = true;                 // argument-principle check of the central block
  bool check_simplicity = true;             // small-disc count around each root
  bool eigenfunctions = true;
  SolverConfig solver;
};

struct Eigenpair {
  int xi = 1;
  int n = 0;
  double lambda = 0.0;
  double k = 0.0;
  bool a_simple = true;
  int g_mult = 1;
  SolutionPath E;
  std::optional<SolutionPath> E2;  // second basis function when g_mult == 2
  Complex a, b;                    // E = a y1 + b y2, i.e. E(0) = a, E'(0) = b
  int eig_case = 0;                // 1..4: largest scaled entry of the boundary matrix
  double imag_residue = 0.0;       // |Im| of the Rayleigh quotient of E (needs eigenfunctions)
  double bc_residual = 0.0;
  double norm_residual = 0.0;
  double continuity_defect = 0.0;  // shooting mismatch across cell edges, relative
};

struct KInterval {
  double lo = 0.0, hi = 0.0, center = 0.0;
  double lambda_lo() const { return lo * lo * lo; }
  double lambda_hi() const { return hi * hi * hi; }
};

// Minimal N >= 1 past which every tail k-disc holds one root (for this xi). Throws NumericError when
// the bound is out of range.
int counting_threshold(const Measure& p, const Measure& q, int xi, double c_pi);

KInterval localize(int xi, int n, double radius = std::numbers::pi / 3);

// Winding number of Delta_xi around the image of |k - center| = radius.
// center 0 uses the lambda circle of radius radius^3.
int count_zeros_disc(const Measure& p, const Measure& q, int xi, double center_k, double radius_k,
                     const SpectrumConfig& cfg = {});
// Same on a lambda circle.
int count_zeros_lambda(const Measure& p, const Measure& q, int xi, Complex center, double radius,
                       const SpectrumConfig& cfg = {});

struct EigenfunctionResult {
  Complex a, b;
  int eig_case = 0;
  int g_mult = 1;
  SolutionPath E;
  std::optional<SolutionPath> E2;
  double bc_residual = 0.0;
  double norm_residual = 0.0;
  double continuity_defect = 0.0;
};

EigenfunctionResult eigenfunction(const Measure& p, const Measure& q, int xi, double lambda,
                                  const SpectrumConfig& cfg = {});

// a y1 + b y2 by forward integration, L2-normalized with the phase fixed as
// in eigenfunction(). Loses accuracy like exp(0.87|k|); small |k| only.
SolutionPath combination_path(const Measure& p, const Measure& q, double lambda, Complex a, Complex b,
                              const SolverConfig& cfg = {});

// Weak-form quotient: integrating conj(E) against the equation, with the
// d(E')* term moved onto conj(E') by parts. Real for real eigenvalues.
Complex rayleigh_quotient(const Measure& p, const Measure& q, const SolutionPath& E);

Eigenpair find_eigenvalue(const Measure& p, const Measure& q, int xi, int n, const SpectrumConfig& cfg = {});

// Eigenpairs for n in [n_min, n_max], sorted by n.
std::vector<Eigenpair> spectrum_scan(const Measure& p, const Measure& q, int xi, int n_min, int n_max,
                                     const SpectrumConfig& cfg = {});

// Real root of Delta_xi in the k-bracket [lo, hi] holding a sign change.
double refine_root(const Measure& p, const Measure& q, int xi, double k_lo, double k_hi,
                   const SpectrumConfig& cfg = {});

// CSV rows xi,n,lambda,k,a_simple,g_mult,bc_residual,norm_residual (no header).
std::string spectrum_csv_rows(const std::vector<Eigenpair>& pairs);

}  // namespace stieltjes
