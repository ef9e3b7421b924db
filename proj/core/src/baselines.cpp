#include "ernmf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

#include "ernmf/rng.hpp"

namespace ernmf {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Column-wise KKT residual for min ||Ax - b||, x >= 0 with gradient g:
// free coordinates must have |g| small, bound ones g >= -small.
double kkt_violation(const VectorXd& x, const VectorXd& g) {
  double worst = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double v = x[i] > 0.0 ? std::abs(g[i]) : std::max(0.0, -g[i]);
    worst = std::max(worst, v);
  }
  return worst;
}

// Projected-gradient descent with momentum and adaptive restart.  Slow but
// safe: used only for columns block pivoting cannot finish (rank-deficient
// subproblems, cycling).
bool nnls_fallback_column(const MatrixXd& G, const VectorXd& h, VectorXd& x,
                          double tol_abs) {
  const Index k = G.cols();
  double lip = 0.0;
  for (Index i = 0; i < k; ++i) lip = std::max(lip, G.row(i).cwiseAbs().sum());
  if (lip <= 0.0) {
    x.setZero();
    return true;
  }
  const double step = 1.0 / lip;
  x = x.cwiseMax(0.0);
  VectorXd prev = x;
  VectorXd yv = x;
  double t = 1.0;
  constexpr int kMaxIter = 200000;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    VectorXd g = G * yv - h;
    VectorXd next = (yv - step * g).cwiseMax(0.0);
    // Restart the momentum sequence whenever it points uphill.
    if ((yv - next).dot(next - x) > 0.0) {
      t = 1.0;
      yv = x;
      g = G * yv - h;
      next = (yv - step * g).cwiseMax(0.0);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    prev = x;
    x = next;
    yv = x + ((t - 1.0) / t_next) * (x - prev);
    t = t_next;
    if ((iter & 0x7) == 0x7 &&
        kkt_violation(x, VectorXd(G * x - h)) <= tol_abs)
      return true;
  }
  return kkt_violation(x, VectorXd(G * x - h)) <= tol_abs;
}

// Block principal pivoting for one right-hand side.  Returns false when the
// pivot loop hits its cap or produces a non-finite subsystem solution.
bool nnls_bpp_column(const MatrixXd& G, const VectorXd& h, VectorXd& x,
                     double feas_tol) {
  const Index k = G.cols();
  std::vector<char> free_set(static_cast<std::size_t>(k), 0);
  x.setZero();
  VectorXd y = -h;
  Index n_infeasible = std::numeric_limits<Index>::max();
  int backup = 3;
  const int max_pivots = static_cast<int>(5 * k + 100);
  std::vector<Index> fidx;
  for (int pivot = 0; pivot < max_pivots; ++pivot) {
    fidx.clear();
    for (Index i = 0; i < k; ++i)
      if (free_set[static_cast<std::size_t>(i)]) fidx.push_back(i);
    VectorXd xf;
    if (!fidx.empty()) {
      const Index nf = static_cast<Index>(fidx.size());
      MatrixXd gff(nf, nf);
      VectorXd hf(nf);
      for (Index a = 0; a < nf; ++a) {
        hf[a] = h[fidx[static_cast<std::size_t>(a)]];
        for (Index b = 0; b < nf; ++b)
          gff(a, b) = G(fidx[static_cast<std::size_t>(a)],
                        fidx[static_cast<std::size_t>(b)]);
      }
      Eigen::LDLT<MatrixXd> ldlt(gff);
      xf = ldlt.solve(hf);
      if (!xf.allFinite()) return false;
    }
    x.setZero();
    for (std::size_t a = 0; a < fidx.size(); ++a)
      x[fidx[a]] = xf[static_cast<Index>(a)];
    y = G * x - h;

    std::vector<Index> bad;
    for (Index i = 0; i < k; ++i) {
      if (free_set[static_cast<std::size_t>(i)]) {
        if (x[i] < -feas_tol) bad.push_back(i);
      } else if (y[i] < -feas_tol) {
        bad.push_back(i);
      }
    }
    if (bad.empty()) {
      x = x.cwiseMax(0.0);
      return true;
    }
    const Index n_bad = static_cast<Index>(bad.size());
    if (n_bad < n_infeasible) {
      n_infeasible = n_bad;
      backup = 3;
    } else if (backup > 0) {
      --backup;
    } else {
      // Murty's single-exchange safeguard: flip only the largest offender.
      bad.assign(1, bad.back());
    }
    for (Index i : bad)
      free_set[static_cast<std::size_t>(i)] ^= 1;
  }
  return false;
}

IndexList spa_impl(const DataMatrix& M, Index r) {
  const Index d = M.rows();
  const Index m = M.cols();
  if (r < 1 || r > std::min(d, m))
    throw InputError("selection size must satisfy 1 <= r <= min(d, m)");
  MatrixXd R = M.to_dense();
  VectorXd norms = R.colwise().squaredNorm();
  const double scale = norms.maxCoeff();
  std::vector<char> taken(static_cast<std::size_t>(m), 0);
  IndexList picked;
  picked.reserve(static_cast<std::size_t>(r));
  for (Index step = 0; step < r; ++step) {
    Index best = -1;
    double best_norm = -1.0;
    for (Index j = 0; j < m; ++j) {
      if (taken[static_cast<std::size_t>(j)]) continue;
      if (norms[j] > best_norm) {
        best_norm = norms[j];
        best = j;
      }
    }
    if (best < 0 || best_norm <= scale * 1e-24)
      throw InputError(
          "columns are degenerate: fewer admissible directions than requested");
    picked.push_back(best);
    taken[static_cast<std::size_t>(best)] = 1;
    VectorXd q = R.col(best) / std::sqrt(best_norm);
    R.noalias() -= q * (q.transpose() * R);
    norms = R.colwise().squaredNorm();
  }
  return picked;
}

IndexList xray_impl(const DataMatrix& M, Index r, const SelectorConfig& cfg) {
  const Index m = M.cols();
  if (r < 1 || r > m)
    throw InputError("selection size must satisfy 1 <= r <= m");
  // Nonnegativity is deliberately not enforced: noisy data dips slightly
  // below zero and the residual heuristics remain meaningful there.
  const MatrixXd Md = M.to_dense();
  const VectorXd col_norms = Md.colwise().norm();

  rng::Stream stream(rng::derive(cfg.seed, 0x84a7));
  std::vector<char> taken(static_cast<std::size_t>(m), 0);
  IndexList picked;
  picked.reserve(static_cast<std::size_t>(r));
  MatrixXd R = Md;
  MatrixXd A;
  while (static_cast<Index>(picked.size()) < r) {
    if (!picked.empty()) {
      A.resize(Md.rows(), static_cast<Index>(picked.size()));
      for (std::size_t t = 0; t < picked.size(); ++t)
        A.col(static_cast<Index>(t)) = Md.col(picked[t]);
      const MatrixXd X = nnls(A, Md, cfg.nnls_tol);
      R = Md;
      R.noalias() -= A * X;
    }
    const VectorXd res_norms = R.colwise().norm();
    std::vector<Index> violated;
    for (Index j = 0; j < m; ++j)
      if (res_norms[j] > 1e-10 * col_norms[j] && col_norms[j] > 0.0)
        violated.push_back(j);
    if (violated.empty())
      throw InputError(
          "columns are degenerate: fewer admissible directions than requested");

    Index anchor = -1;
    switch (cfg.algorithm) {
      case SelectorAlgorithm::xray_rand: {
        anchor = violated[static_cast<std::size_t>(
            stream.below(static_cast<std::uint64_t>(violated.size())))];
        break;
      }
      case SelectorAlgorithm::xray_max: {
        double best = -1.0;
        for (Index j : violated)
          if (res_norms[j] > best) {
            best = res_norms[j];
            anchor = j;
          }
        break;
      }
      case SelectorAlgorithm::xray_dist: {
        double best = -1.0;
        for (Index j : violated) {
          const double score = res_norms[j] / col_norms[j];
          if (score > best) {
            best = score;
            anchor = j;
          }
        }
        break;
      }
      case SelectorAlgorithm::xray_greedy: {
        // Anchor on the residual whose best admissible functional value,
        // per unit residual norm, is largest.
        double best = -std::numeric_limits<double>::infinity();
        for (Index j : violated) {
          const VectorXd scores = Md.transpose() * R.col(j);
          double top = -std::numeric_limits<double>::infinity();
          for (Index t = 0; t < m; ++t)
            if (!taken[static_cast<std::size_t>(t)])
              top = std::max(top, scores[t]);
          const double score = top / res_norms[j];
          if (score > best) {
            best = score;
            anchor = j;
          }
        }
        break;
      }
      default:
        throw InputError("xray called with a non-xray policy");
    }

    const VectorXd scores = Md.transpose() * R.col(anchor);
    Index expand = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Index t = 0; t < m; ++t) {
      if (taken[static_cast<std::size_t>(t)]) continue;
      if (scores[t] > best) {
        best = scores[t];
        expand = t;
      }
    }
    picked.push_back(expand);
    taken[static_cast<std::size_t>(expand)] = 1;
  }
  return picked;
}

}  // namespace

SelectorAlgorithm parse_selector(const std::string& name) {
  if (name == "spa") return SelectorAlgorithm::spa;
  if (name == "xray-rand") return SelectorAlgorithm::xray_rand;
  if (name == "xray-max") return SelectorAlgorithm::xray_max;
  if (name == "xray-dist") return SelectorAlgorithm::xray_dist;
  if (name == "xray-greedy") return SelectorAlgorithm::xray_greedy;
  throw InputError("unknown selector: " + name);
}

std::string selector_name(SelectorAlgorithm algorithm) {
  switch (algorithm) {
    case SelectorAlgorithm::spa:
      return "spa";
    case SelectorAlgorithm::xray_rand:
      return "xray-rand";
    case SelectorAlgorithm::xray_max:
      return "xray-max";
    case SelectorAlgorithm::xray_dist:
      return "xray-dist";
    case SelectorAlgorithm::xray_greedy:
      return "xray-greedy";
  }
  throw InputError("unknown selector enum value");
}

MatrixXd nnls(const MatrixXd& A, const MatrixXd& B, double tol) {
  if (A.rows() != B.rows())
    throw InputError("nnls: A and B must have the same number of rows");
  if (!(tol > 0.0)) throw InputError("nnls: tolerance must be positive");
  const Index k = A.cols();
  const Index n = B.cols();
  MatrixXd X(k, n);
  if (k == 0 || n == 0) return X;
  const MatrixXd G = A.transpose() * A;
  const MatrixXd H = A.transpose() * B;
  const double g_scale = std::max(G.diagonal().maxCoeff(), 0.0);
  VectorXd x(k);
  for (Index j = 0; j < n; ++j) {
    const VectorXd h = H.col(j);
    const double scale = std::max({g_scale, h.cwiseAbs().maxCoeff(), 1.0});
    const double feas_tol = 1e-13 * scale;
    const double tol_abs = tol * scale;
    bool ok = nnls_bpp_column(G, h, x, feas_tol);
    if (ok) ok = kkt_violation(x, VectorXd(G * x - h)) <= tol_abs;
    if (!ok && !nnls_fallback_column(G, h, x, tol_abs)) {
      const double residual = kkt_violation(x, VectorXd(G * x - h));
      throw NonConvergenceError(
          "nnls failed to reach first-order optimality", residual);
    }
    X.col(j) = x;
  }
  return X;
}

IndexList spa(const DataMatrix& M, Index r) { return spa_impl(M, r); }

IndexList xray(const DataMatrix& M, Index r, const SelectorConfig& cfg) {
  return xray_impl(M, r, cfg);
}

IndexList select_columns(const DataMatrix& M, Index r,
                         const SelectorConfig& cfg) {
  if (cfg.algorithm == SelectorAlgorithm::spa) return spa_impl(M, r);
  return xray_impl(M, r, cfg);
}

MatrixXd weight_matrix(const DataMatrix& M, const IndexList& I, double tol) {
  for (Index i : I)
    if (i < 0 || i >= M.cols())
      throw InputError("weight_matrix: index out of range");
  const MatrixXd A = M.gather_cols(I);
  return nnls(A, M.to_dense(), tol);
}

}  // namespace ernmf
