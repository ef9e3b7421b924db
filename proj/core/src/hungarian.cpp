#include "ernmf/hungarian.hpp"

#include <limits>
#include <vector>

namespace ernmf {

IndexList max_assignment(const Eigen::MatrixXd& score, double* total) {
  const Index n = score.rows();
  if (n != score.cols()) throw InputError("max_assignment: matrix not square");
  if (n == 0) {
    if (total) *total = 0.0;
    return {};
  }
  if (!score.allFinite())
    throw InputError("max_assignment: scores must be finite");

  // Minimize the negated scores.  1-based arrays with a virtual 0 column, the
  // classic potentials formulation.
  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<Index> match(static_cast<std::size_t>(n) + 1, 0);  // col -> row
  std::vector<Index> way(static_cast<std::size_t>(n) + 1, 0);

  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = kInf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur =
            -score(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
            v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] +=
              delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  IndexList row_to_col(static_cast<std::size_t>(n), -1);
  double achieved = 0.0;
  for (Index j = 1; j <= n; ++j) {
    const Index i = match[static_cast<std::size_t>(j)];
    row_to_col[static_cast<std::size_t>(i - 1)] = j - 1;
    achieved += score(i - 1, j - 1);
  }
  if (total) *total = achieved;
  return row_to_col;
}

}  // namespace ernmf
