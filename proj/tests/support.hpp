#pragma once

#include <Eigen/Dense>

#include <ernmf/rng.hpp>
#include <ernmf/types.hpp>

namespace test_support {

inline Eigen::MatrixXd random_matrix(ernmf::rng::Stream& s, ernmf::Index rows,
                                     ernmf::Index cols) {
  Eigen::MatrixXd M(rows, cols);
  for (ernmf::Index j = 0; j < cols; ++j)
    for (ernmf::Index i = 0; i < rows; ++i) M(i, j) = s.gauss();
  return M;
}

inline Eigen::MatrixXd random_nonneg(ernmf::rng::Stream& s, ernmf::Index rows,
                                     ernmf::Index cols) {
  Eigen::MatrixXd M(rows, cols);
  for (ernmf::Index j = 0; j < cols; ++j)
    for (ernmf::Index i = 0; i < rows; ++i) M(i, j) = s.uniform01();
  return M;
}

// Random orthogonal matrix via QR with a sign-fixed diagonal.
inline Eigen::MatrixXd random_orthogonal(ernmf::rng::Stream& s,
                                         ernmf::Index n) {
  const Eigen::MatrixXd G = random_matrix(s, n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (ernmf::Index i = 0; i < n; ++i)
    if (R(i, i) < 0) Q.col(i) = -Q.col(i);
  return Q;
}

// Columns on the simplex: convex combinations with every weight positive.
inline Eigen::MatrixXd random_convex_weights(ernmf::rng::Stream& s,
                                             ernmf::Index r,
                                             ernmf::Index count) {
  Eigen::MatrixXd K(r, count);
  for (ernmf::Index j = 0; j < count; ++j) {
    double total = 0.0;
    for (ernmf::Index i = 0; i < r; ++i) {
      K(i, j) = 0.05 + s.uniform01();
      total += K(i, j);
    }
    K.col(j) /= total;
  }
  return K;
}

}  // namespace test_support
