#pragma once

#include <Eigen/Dense>

#include "ernmf/types.hpp"

namespace ernmf {

// Maximum-total-score perfect assignment on a square score matrix, solved by
// shortest augmenting paths with potentials (O(n^3)).  Returns match[i] = the
// column assigned to row i; total (when given) receives the achieved score.
IndexList max_assignment(const Eigen::MatrixXd& score, double* total = nullptr);

}  // namespace ernmf
