#include "ernmf/er.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include <Eigen/SVD>

#include "ernmf/svd.hpp"

namespace ernmf {

namespace {

// Full dual solve for compact problems, cutting plane once the column count
// dwarfs the dimension.
MveeSolution solve_auto(const Eigen::MatrixXd& P, const CuttingPlaneConfig& cfg) {
  const Index rho = P.rows();
  const Index m = P.cols();
  if (m > std::max<Index>(8 * rho, 96)) return solve_q_cutting_plane(P, cfg);
  return solve_q_full(P, cfg.tol, cfg.active_tol, cfg.max_inner);
}

}  // namespace

double mu(const Eigen::MatrixXd& K) {
  if (!K.allFinite()) throw InputError("mu: K must be finite");
  if (K.cols() == 0) return 0.0;
  return K.colwise().norm().maxCoeff();
}

InstanceDiagnostics epsilon_bound(const Eigen::MatrixXd& F,
                                  const Eigen::MatrixXd& K) {
  if (!F.allFinite()) throw InputError("epsilon_bound: F must be finite");
  if (F.cols() < 1 || F.rows() < 1)
    throw InputError("epsilon_bound: F must be nonempty");
  Eigen::BDCSVD<Eigen::MatrixXd> dec(F);
  const Eigen::VectorXd sv = dec.singularValues();
  const double thr = rank_threshold(sv[0], F.rows(), F.cols());
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > thr) ++rank;
  if (F.rows() < F.cols() || rank < F.cols())
    throw RankError("epsilon_bound: F must have full column rank", rank);
  InstanceDiagnostics out;
  out.sigma = sv[F.cols() - 1];
  out.mu = mu(K);
  out.epsilon = std::max(0.0, out.sigma * (1.0 - out.mu) / 4.0);
  return out;
}

ErResult er_exact(const DataMatrix& M, Index r, const CuttingPlaneConfig& cfg) {
  if (r < 1) throw InputError("er_exact: r must be >= 1");
  const ReducedEmbedding emb = reduce(M, r);
  MveeSolution sol = solve_auto(emb.P, cfg);
  ErResult out;
  out.candidate_set = sol.active_indices;
  out.rho_used = r;
  out.mvee = std::move(sol);
  if (static_cast<Index>(out.candidate_set.size()) != r)
    throw AmbiguousActiveSetError(
        "active set has " + std::to_string(out.candidate_set.size()) +
            " points where exactly " + std::to_string(r) +
            " were required; use the escalating variant to select among them",
        out.candidate_set);
  out.indices = out.candidate_set;
  return out;
}

ErResult er_practical(const DataMatrix& M, Index r, Index rho0,
                      const SelectorConfig& selector,
                      const CuttingPlaneConfig& cfg) {
  if (r < 1) throw InputError("er_practical: r must be >= 1");
  if (rho0 < 1) throw InputError("er_practical: rho0 must be >= 1");
  // Cheap probe instead of a full rank computation: the escalation loop is
  // capped by reduce itself, which refuses dimensions past the numerical rank.
  if (!rank_at_least(M, r))
    throw RankError("er_practical: r exceeds the numerical rank",
                    numerical_rank(M));

  ErResult out;
  for (Index rho = rho0;; ++rho) {
    const ReducedEmbedding emb = reduce(M, rho);
    MveeSolution sol = solve_auto(emb.P, cfg);
    if (static_cast<Index>(sol.active_indices.size()) >= r) {
      out.mvee = std::move(sol);
      out.rho_used = rho;
      break;
    }
  }
  out.candidate_set = out.mvee.active_indices;
  if (static_cast<Index>(out.candidate_set.size()) == r) {
    out.indices = out.candidate_set;
    return out;
  }

  const DataMatrix MJ = DataMatrix::dense(M.gather_cols(out.candidate_set));
  const IndexList local = select_columns(MJ, r, selector);
  IndexList mapped;
  mapped.reserve(local.size());
  for (Index i : local) {
    if (i < 0 || i >= static_cast<Index>(out.candidate_set.size()))
      throw NumericalError("er_practical: selector returned an index outside "
                           "the candidate set");
    mapped.push_back(out.candidate_set[static_cast<std::size_t>(i)]);
  }
  std::sort(mapped.begin(), mapped.end());
  if (std::adjacent_find(mapped.begin(), mapped.end()) != mapped.end())
    throw NumericalError("er_practical: selector returned duplicate indices");
  out.indices = std::move(mapped);
  out.selector_used = selector.algorithm;
  return out;
}

}  // namespace ernmf
