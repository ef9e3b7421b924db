#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "ernmf/matrix.hpp"
#include "ernmf/types.hpp"

namespace ernmf {

enum class SelectorAlgorithm {
  spa,
  xray_rand,
  xray_max,
  xray_dist,
  xray_greedy,
};

SelectorAlgorithm parse_selector(const std::string& name);
std::string selector_name(SelectorAlgorithm algorithm);

struct SelectorConfig {
  SelectorAlgorithm algorithm = SelectorAlgorithm::spa;
  std::uint64_t seed = 0;   // consumed by xray_rand only
  double nnls_tol = 1e-10;
};

// Successive projection: pick the largest-norm residual column, project all
// columns onto its orthogonal complement, repeat.  Ties break to the lowest
// index.
IndexList spa(const DataMatrix& M, Index r);

// Residual-driven greedy expansion.  Each round fits the data in the cone of
// the picks so far (nonnegative least squares), chooses a violated residual
// column per policy, and admits the column maximizing the linear functional
// with that residual as its normal.
IndexList xray(const DataMatrix& M, Index r, const SelectorConfig& cfg);

// Dispatch on cfg.algorithm.
IndexList select_columns(const DataMatrix& M, Index r,
                         const SelectorConfig& cfg);

// min_{X >= 0} ||A X - B||_F^2 column by column: block principal pivoting
// with a projected-gradient fallback for columns it cannot pivot to
// optimality.
Eigen::MatrixXd nnls(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     double tol = 1e-10);

// W* = argmin_{X >= 0} ||M(I) X - M||_F^2.
Eigen::MatrixXd weight_matrix(const DataMatrix& M, const IndexList& I,
                              double tol = 1e-10);

}  // namespace ernmf
