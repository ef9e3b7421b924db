#include "ernmf/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "ernmf/rng.hpp"

namespace ernmf {

namespace {

constexpr Index kSparseIterativeCutoff = 512;  // min(d,m) above which sparse
                                               // inputs take the iterative path
constexpr Index kFullFactorLimit = 2048;       // square factors below this size

struct ThinSvd {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd V;
};

ThinSvd dense_thin_svd(const Eigen::MatrixXd& values) {
  Eigen::BDCSVD<Eigen::MatrixXd> solver(values,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

// Leading-k singular triplets of a sparse matrix by blocked subspace
// iteration with a Rayleigh-Ritz finish.  Deterministic: the start block is
// seeded from the matrix shape only.
ThinSvd sparse_truncated_svd(const Eigen::SparseMatrix<double>& A, Index k) {
  const Index d = A.rows();
  const Index m = A.cols();
  const Index t = std::min(d, m);
  const Index block = std::min(t, k + std::min<Index>(10, t - k));

  rng::Stream stream(rng::derive(0x5eed5eedULL, static_cast<std::uint64_t>(d),
                                 static_cast<std::uint64_t>(m),
                                 static_cast<std::uint64_t>(k)));
  Eigen::MatrixXd X(m, block);
  for (Index j = 0; j < block; ++j)
    for (Index i = 0; i < m; ++i) X(i, j) = stream.gauss();

  Eigen::MatrixXd Q = A * X;
  auto orthonormalize = [](Eigen::MatrixXd& B) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
    B = qr.householderQ() * Eigen::MatrixXd::Identity(B.rows(), B.cols());
  };
  orthonormalize(Q);

  Eigen::VectorXd prev = Eigen::VectorXd::Zero(k);
  const Index max_rounds = 400;
  for (Index round = 0; round < max_rounds; ++round) {
    Eigen::MatrixXd W = A.transpose() * Q;
    orthonormalize(W);
    Q = A * W;
    orthonormalize(Q);

    Eigen::MatrixXd B = Q.transpose() * A;  // block x m
    Eigen::BDCSVD<Eigen::MatrixXd> small(B, Eigen::ComputeThinU |
                                                Eigen::ComputeThinV);
    const Eigen::VectorXd head = small.singularValues().head(k);
    const double scale = std::max(head[0], 1e-300);
    if ((head - prev).cwiseAbs().maxCoeff() <= 1e-12 * scale ||
        round == max_rounds - 1) {
      ThinSvd out;
      out.U = Q * small.matrixU().leftCols(k);
      out.sigma = head;
      out.V = small.matrixV().leftCols(k);
      return out;
    }
    prev = head;
  }
  throw NumericalError("truncated SVD failed to converge");
}

bool use_iterative_path(const DataMatrix& M) {
  return M.is_sparse() && std::min(M.rows(), M.cols()) > kSparseIterativeCutoff;
}

}  // namespace

double rank_threshold(double sigma_1, Index rows, Index cols) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * sigma_1;
}

SvdFactors svd(const DataMatrix& M) {
  const Eigen::MatrixXd values = M.to_dense();
  const bool full = std::max(M.rows(), M.cols()) <= kFullFactorLimit;
  SvdFactors out;
  out.thin = !full;
  const unsigned options = full ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                                : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::BDCSVD<Eigen::MatrixXd> solver(values, options);
  out.U = solver.matrixU();
  out.singular_values = solver.singularValues();
  out.V = solver.matrixV();
  return out;
}

Index numerical_rank(const DataMatrix& M) {
  Eigen::VectorXd sigma;
  if (use_iterative_path(M)) {
    const Index t = std::min(M.rows(), M.cols());
    Index k = std::min<Index>(t, 32);
    for (;;) {
      sigma = sparse_truncated_svd(M.sparse_values(), k).sigma;
      const double thresh = rank_threshold(sigma[0], M.rows(), M.cols());
      if (sigma[k - 1] <= thresh || k == t) break;
      k = std::min(t, k * 2);
    }
  } else {
    sigma = dense_thin_svd(M.to_dense()).sigma;
  }
  const double thresh = rank_threshold(sigma[0], M.rows(), M.cols());
  Index rank = 0;
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] > thresh) ++rank;
  return rank;
}

bool rank_at_least(const DataMatrix& M, Index r) {
  if (r < 1) return true;
  if (r > std::min(M.rows(), M.cols())) return false;
  Eigen::VectorXd sigma;
  if (use_iterative_path(M))
    sigma = sparse_truncated_svd(M.sparse_values(), r).sigma;
  else
    sigma = dense_thin_svd(M.to_dense()).sigma;
  return sigma[r - 1] > rank_threshold(sigma[0], M.rows(), M.cols());
}

DataMatrix best_rank_r(const DataMatrix& M, Index r) {
  const Index t = std::min(M.rows(), M.cols());
  if (r < 1 || r > t)
    throw InputError("best_rank_r: rank out of range");
  ThinSvd f;
  if (use_iterative_path(M))
    f = sparse_truncated_svd(M.sparse_values(), r);
  else
    f = dense_thin_svd(M.to_dense());
  const Eigen::MatrixXd approx = f.U.leftCols(r) *
                                 f.sigma.head(r).asDiagonal() *
                                 f.V.leftCols(r).transpose();
  return DataMatrix::dense(approx);
}

ReducedEmbedding reduce(const DataMatrix& M, Index rho) {
  const Index t = std::min(M.rows(), M.cols());
  if (rho < 1 || rho > t)
    throw RankError("reduce: requested dimension out of range",
                    rho > t ? t : numerical_rank(M));
  ThinSvd f;
  if (use_iterative_path(M))
    f = sparse_truncated_svd(M.sparse_values(), std::min(rho + 1, t));
  else
    f = dense_thin_svd(M.to_dense());

  const double thresh = rank_threshold(f.sigma[0], M.rows(), M.cols());
  if (f.sigma[rho - 1] <= thresh)
    throw RankError("reduce: requested dimension exceeds numerical rank",
                    numerical_rank(M));

  ReducedEmbedding out;
  out.rank_used = rho;
  out.U = f.U.leftCols(rho);
  // P = Sigma_rho * V_rho^T, so that M^rho = U * P.
  out.P = f.sigma.head(rho).asDiagonal() * f.V.leftCols(rho).transpose();
  out.discarded_energy = rho < f.sigma.size() ? f.sigma[rho] : 0.0;
  if (rho >= t) out.discarded_energy = 0.0;
  return out;
}

double spectral_norm(const Eigen::MatrixXd& M) {
  if (std::max(M.rows(), M.cols()) <= kFullFactorLimit) {
    Eigen::BDCSVD<Eigen::MatrixXd> solver(M);
    return solver.singularValues()[0];
  }
  // Power iteration on M^T M with a deterministic start.
  rng::Stream stream(rng::derive(0x00a17e57ULL,
                                 static_cast<std::uint64_t>(M.rows()),
                                 static_cast<std::uint64_t>(M.cols())));
  Eigen::VectorXd x(M.cols());
  for (Index i = 0; i < M.cols(); ++i) x[i] = stream.gauss();
  x.normalize();
  double sigma = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd y = M.transpose() * (M * x);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    const double next = std::sqrt(norm);
    y /= norm;
    if (std::abs(next - sigma) <= 1e-12 * std::max(next, 1.0)) return next;
    sigma = next;
    x = y;
  }
  return sigma;
}

double spectral_norm(const DataMatrix& M) {
  if (!use_iterative_path(M)) return spectral_norm(M.to_dense());
  return sparse_truncated_svd(M.sparse_values(), 1).sigma[0];
}

}  // namespace ernmf
