#pragma once

#include <Eigen/Dense>

#include "ernmf/matrix.hpp"
#include "ernmf/types.hpp"

namespace ernmf {

struct SvdFactors {
  Eigen::MatrixXd U;             // d x d, or d x t when thin
  Eigen::VectorXd singular_values;  // nonincreasing, length t = min(d,m)
  Eigen::MatrixXd V;             // m x m, or m x t when thin
  bool thin = false;
};

// P is rho x m with (P; 0) = U^T M^rho; U holds the left factor actually
// used (d x rho), so M^rho = U * P.
struct ReducedEmbedding {
  Eigen::MatrixXd P;
  Eigen::MatrixXd U;
  Index rank_used = 0;
  double discarded_energy = 0.0;  // sigma_{rho+1}, 0 when rho = min(d,m)
};

// Rank decision threshold: sigma_i counts toward the rank iff
// sigma_i > max(d,m) * eps * sigma_1.
double rank_threshold(double sigma_1, Index rows, Index cols);

SvdFactors svd(const DataMatrix& M);

Index numerical_rank(const DataMatrix& M);

// Cheap one-sided check used by preconditions: numerical_rank(M) >= r.
bool rank_at_least(const DataMatrix& M, Index r);

DataMatrix best_rank_r(const DataMatrix& M, Index r);

ReducedEmbedding reduce(const DataMatrix& M, Index rho);

// Largest singular value.
double spectral_norm(const DataMatrix& M);
double spectral_norm(const Eigen::MatrixXd& M);

}  // namespace ernmf
