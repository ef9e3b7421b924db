#pragma once

#include <iosfwd>

#include <Eigen/Dense>

#include "ernmf/types.hpp"

// Origin-centered minimum-volume enclosing ellipsoid of the symmetric point
// set {+-p_1,...,+-p_m}, the columns of a rho x m matrix P.  Central symmetry
// is implicit: -p is never stored, because every quantity used (omega, delta)
// depends only on p p^T.
//
// The solver works on the dual: maximize log det Omega(u) over the unit
// simplex, Omega(u) = P diag(u) P^T, by conditional-gradient steps with
// away-steps; the shape matrix is recovered as L = (1/rho) Omega(u)^{-1}.

namespace ernmf {

struct KktReport {
  double stationarity_residual = 0.0;    // ||rho L Omega(u) - I||_F
  double complementarity_residual = 0.0;  // max_i u_i (1 - delta_i)
  double primal_violation = 0.0;          // max(0, max_i delta_i - 1)
  double dual_violation = 0.0;            // max(0, -min_i u_i)
};

struct MveeSolution {
  Eigen::MatrixXd L;        // rho x rho symmetric positive definite
  Eigen::VectorXd u;        // m nonnegative weights summing to 1
  IndexList active_indices;  // delta_i >= 1 - active_tol
  Eigen::VectorXd deltas;   // delta_i = p_i^T L p_i
  KktReport kkt;
  double objective = 0.0;   // -log det L
  Index inner_iterations = 0;
  Index outer_iterations = 0;  // 0 for a direct full solve
};

struct CuttingPlaneConfig {
  double theta = 0.9999;   // working-set shrink threshold
  double eta = 5.0;        // expand-batch divisor
  double tol = 1e-7;       // conditional-gradient termination tolerance
  double active_tol = 1e-4;
  Index max_outer = 200;
  Index max_inner = 2000000;
};

class MveeNonConvergenceError : public NumericalError {
 public:
  MveeNonConvergenceError(const std::string& what, MveeSolution best_iterate)
      : NumericalError(what), best(std::move(best_iterate)) {}
  MveeSolution best;
};

// Omega(u) = sum_i u_i p_i p_i^T.
Eigen::MatrixXd omega(const Eigen::MatrixXd& P, const Eigen::VectorXd& u);

// delta_L(p) = p^T L p; even in p.
double delta(const Eigen::MatrixXd& L, const Eigen::VectorXd& p);

// Greedy spanning initializer: repeatedly pick the column farthest along a
// direction orthogonal to the span of the picks so far.  Returns rho sorted
// indices whose columns are linearly independent.
IndexList init_working_set(const Eigen::MatrixXd& P);

MveeSolution solve_q_full(const Eigen::MatrixXd& P, double tol = 1e-7,
                          double active_tol = 1e-4,
                          Index max_inner = 2000000);

// Working-set variant: solve over a small subset, admit violators in batches,
// retire interior points, repeat until every column satisfies delta <= 1
// within tolerance.  `trace` receives one CSV row per outer iteration.
MveeSolution solve_q_cutting_plane(const Eigen::MatrixXd& P,
                                   const CuttingPlaneConfig& cfg = {},
                                   std::ostream* trace = nullptr);

IndexList active_points(const MveeSolution& sol, double active_tol);

}  // namespace ernmf
