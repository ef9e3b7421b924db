#pragma once

#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "ernmf/baselines.hpp"
#include "ernmf/matrix.hpp"
#include "ernmf/mvee.hpp"
#include "ernmf/types.hpp"

namespace ernmf {

// Conditioning quantities for a separable model F [I K] Pi + N: sigma is the
// smallest singular value of F, mu the largest column norm of K, and epsilon
// the noise radius under which index recovery is guaranteed.
struct InstanceDiagnostics {
  double sigma = 0.0;
  double mu = 0.0;
  double epsilon = 0.0;
  double noise_norm = std::numeric_limits<double>::quiet_NaN();  // ||N||_2
};

struct ErResult {
  IndexList indices;        // I: |I| = r, ascending
  IndexList candidate_set;  // J: active set of the ellipsoid stage, ascending
  Index rho_used = 0;
  MveeSolution mvee;
  // Set only when a selection pass over M(J) actually ran.
  std::optional<SelectorAlgorithm> selector_used;
};

// Largest column 2-norm of K; 0 for an empty K.
double mu(const Eigen::MatrixXd& K);

// sigma_r(F) * (1 - mu(K)) / 4, with the ingredients reported alongside.
// F must have full column rank.
InstanceDiagnostics epsilon_bound(const Eigen::MatrixXd& F,
                                  const Eigen::MatrixXd& K);

// Reduce M to r dimensions and take the active points of the minimum-volume
// origin-centered symmetric ellipsoid around its columns.  Performs no
// selection: exactly r active points or an AmbiguousActiveSetError carrying
// the candidate set.
ErResult er_exact(const DataMatrix& M, Index r,
                  const CuttingPlaneConfig& cfg = {});

// Escalating variant: run the ellipsoid stage at dimension rho = rho0,
// rho0+1, ... until at least r active points emerge, then pick r of them by
// running the configured selector on the candidate columns.
ErResult er_practical(const DataMatrix& M, Index r, Index rho0,
                      const SelectorConfig& selector,
                      const CuttingPlaneConfig& cfg = {});

}  // namespace ernmf
