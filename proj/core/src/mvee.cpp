#include "ernmf/mvee.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include <Eigen/Cholesky>

namespace ernmf {

Eigen::MatrixXd omega(const Eigen::MatrixXd& P, const Eigen::VectorXd& u) {
  if (u.size() != P.cols())
    throw InputError("omega: weight length does not match column count");
  if (!u.allFinite()) throw InputError("omega: non-finite weights");
  Eigen::MatrixXd result = P * u.asDiagonal() * P.transpose();
  // Symmetrize away rounding skew.
  result = 0.5 * (result + result.transpose()).eval();
  return result;
}

double delta(const Eigen::MatrixXd& L, const Eigen::VectorXd& p) {
  return p.dot(L * p);
}

IndexList init_working_set(const Eigen::MatrixXd& P) {
  const Index rho = P.rows();
  const Index m = P.cols();
  const double scale = P.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw RankError("init_working_set: zero matrix", 0);

  Eigen::MatrixXd basis(rho, rho);  // orthonormal basis of the span so far
  IndexList chosen;
  chosen.reserve(static_cast<std::size_t>(rho));

  for (Index k = 0; k < rho; ++k) {
    Eigen::VectorXd direction;
    if (k == 0) {
      direction = Eigen::VectorXd::Unit(rho, 0);
    } else {
      // Direction: the coordinate axis least covered by the span so far,
      // projected onto its orthogonal complement.
      Index best_axis = 0;
      double best_norm = -1.0;
      for (Index j = 0; j < rho; ++j) {
        Eigen::VectorXd resid = Eigen::VectorXd::Unit(rho, j);
        resid -= basis.leftCols(k) * (basis.leftCols(k).transpose() * resid);
        const double n2 = resid.squaredNorm();
        if (n2 > best_norm + 1e-15) {
          best_norm = n2;
          best_axis = j;
        }
      }
      direction = Eigen::VectorXd::Unit(rho, best_axis);
      direction -=
          basis.leftCols(k) * (basis.leftCols(k).transpose() * direction);
      const double norm = direction.norm();
      if (norm <= 1e-14) throw RankError("init_working_set: span collapsed", k);
      direction /= norm;
    }

    const Eigen::VectorXd scores = (direction.transpose() * P).cwiseAbs();
    Index pick = 0;
    double best = -1.0;
    for (Index i = 0; i < m; ++i) {
      if (scores[i] > best) {
        best = scores[i];
        pick = i;
      }
    }
    if (best <= 1e-12 * scale)
      throw RankError("init_working_set: columns span only " +
                          std::to_string(k) + " dimensions",
                      k);

    Eigen::VectorXd q = P.col(pick);
    q -= basis.leftCols(k) * (basis.leftCols(k).transpose() * q);
    const double qnorm = q.norm();
    if (qnorm <= 1e-12 * scale)
      throw RankError("init_working_set: dependent column selected", k);
    basis.col(k) = q / qnorm;
    chosen.push_back(pick);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

// Conditional-gradient state over a fixed point set (columns of Pw).
struct InnerState {
  Eigen::VectorXd u;      // simplex weights
  Eigen::MatrixXd inv;    // Omega(u)^{-1}
  Eigen::VectorXd g;      // g_i = p_i^T inv p_i = rho * delta_i
  double logdet = 0.0;    // log det Omega(u)
  Index iterations = 0;
};

// Cholesky of Omega(u) with the one-shot jitter fallback.
Eigen::LLT<Eigen::MatrixXd> factor_omega(const Eigen::MatrixXd& om) {
  Eigen::LLT<Eigen::MatrixXd> llt(om);
  if (llt.info() == Eigen::Success) return llt;
  const Index rho = om.rows();
  const double jitter = 1e-12 * om.trace() / static_cast<double>(rho);
  Eigen::MatrixXd bumped = om;
  bumped.diagonal().array() += jitter;
  llt.compute(bumped);
  if (llt.info() != Eigen::Success)
    throw NumericalError("ellipsoid shape matrix lost positive definiteness");
  return llt;
}

void refresh(InnerState& state, const Eigen::MatrixXd& Pw) {
  const Index rho = Pw.rows();
  state.u = state.u.cwiseMax(0.0);
  const double total = state.u.sum();
  if (!(total > 0.0)) throw NumericalError("dual weights collapsed to zero");
  state.u /= total;

  const Eigen::MatrixXd om = omega(Pw, state.u);
  const auto llt = factor_omega(om);
  state.inv =
      llt.solve(Eigen::MatrixXd::Identity(rho, rho));
  state.inv = (0.5 * (state.inv + state.inv.transpose())).eval();
  state.g = ((state.inv * Pw).cwiseProduct(Pw)).colwise().sum();
  state.logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

// Away-step conditional gradient on max log det Omega(u) over the simplex.
// Terminates when max_i g_i <= rho (1 + tol) and the weighted complementarity
// max_i u_i (rho - g_i) <= rho * tol.  Returns false when the iteration cap
// is reached, leaving the best iterate in `state`.
bool inner_solve(InnerState& state, const Eigen::MatrixXd& Pw, double tol,
                 Index max_iter) {
  const Index rho = Pw.rows();
  const Index n = Pw.cols();
  const double rho_d = static_cast<double>(rho);

  refresh(state, Pw);
  bool fresh = true;
  Index iter = 0;

  for (;;) {
    // Frank-Wolfe candidate: the most violated point.
    Index j = 0;
    double gmax = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (state.g[i] > gmax) {
        gmax = state.g[i];
        j = i;
      }
    }
    // Away candidate: the weakest supported point.
    Index k = -1;
    double gmin = std::numeric_limits<double>::infinity();
    double weighted_comp = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (state.u[i] > 0.0) {
        if (state.g[i] < gmin) {
          gmin = state.g[i];
          k = i;
        }
        weighted_comp = std::max(weighted_comp,
                                 state.u[i] * (rho_d - state.g[i]));
      }
    }

    const double gap_plus = gmax - rho_d;
    if (gap_plus <= rho_d * tol && weighted_comp <= rho_d * tol) {
      if (fresh) break;
      refresh(state, Pw);
      fresh = true;
      continue;
    }
    if (iter >= max_iter) {
      if (!fresh) refresh(state, Pw);
      state.iterations = iter;
      return false;
    }

    const double gap_minus = k >= 0 ? rho_d - gmin : -1.0;
    Index idx;
    double lambda;
    bool drop = false;
    if (gap_plus >= gap_minus || k < 0 || state.u[k] >= 1.0 - 1e-15) {
      // Toward step: exact line search along (1-l) u + l e_j.
      idx = j;
      lambda = (state.g[j] - rho_d) / (rho_d * (state.g[j] - 1.0));
      lambda = std::min(lambda, 1.0 - 1e-12);
      if (lambda <= 0.0) lambda = std::min(1e-12, gap_plus / rho_d);
    } else {
      // Away step: shift weight off the weakest support point, clamped so
      // u_k stays nonnegative.
      idx = k;
      const double lambda_min = -state.u[k] / (1.0 - state.u[k]);
      if (state.g[k] > 1.0 + 1e-14) {
        lambda = (state.g[k] - rho_d) / (rho_d * (state.g[k] - 1.0));
        lambda = std::max(lambda, lambda_min);
      } else {
        lambda = lambda_min;
      }
      drop = lambda <= lambda_min * (1.0 - 1e-14);
    }

    const double c = lambda / (1.0 - lambda);
    const double beta = 1.0 + c * state.g[idx];
    if (beta <= 1e-13 || !std::isfinite(beta)) {
      // Step would make the factor singular at working precision; land on
      // the boundary and rebuild from scratch.
      state.u *= (1.0 - lambda);
      state.u[idx] += lambda;
      if (drop) state.u[idx] = 0.0;
      refresh(state, Pw);
      fresh = true;
      ++iter;
      continue;
    }

    // Rank-one update of the inverse and of all g_i.
    const Eigen::VectorXd w = state.inv * Pw.col(idx);
    const Eigen::VectorXd cross = Pw.transpose() * w;
    const double factor = c / beta;
    state.inv -= factor * (w * w.transpose());
    state.inv /= (1.0 - lambda);
    state.g -= factor * cross.cwiseProduct(cross);
    state.g /= (1.0 - lambda);

    state.u *= (1.0 - lambda);
    state.u[idx] += lambda;
    if (drop) state.u[idx] = 0.0;

    ++iter;
    fresh = false;
    if (iter % 256 == 0) {
      refresh(state, Pw);
      fresh = true;
    }
  }
  state.iterations = iter;
  return true;
}

Eigen::VectorXd all_deltas(const Eigen::MatrixXd& L, const Eigen::MatrixXd& P) {
  return ((L * P).cwiseProduct(P)).colwise().sum();
}

// Builds the public solution from converged inner state mapped onto the full
// column set.
MveeSolution assemble(const Eigen::MatrixXd& P, const Eigen::VectorXd& u_full,
                      const InnerState& state, double active_tol) {
  const Index rho = P.rows();
  const Index m = P.cols();
  const double rho_d = static_cast<double>(rho);

  MveeSolution sol;
  sol.u = u_full;
  sol.L = state.inv / rho_d;
  sol.deltas = all_deltas(sol.L, P);
  sol.inner_iterations = state.iterations;

  for (Index i = 0; i < m; ++i)
    if (sol.deltas[i] >= 1.0 - active_tol) sol.active_indices.push_back(i);

  // KKT residuals, from scratch.
  Eigen::MatrixXd om = Eigen::MatrixXd::Zero(rho, rho);
  for (Index i = 0; i < m; ++i)
    if (u_full[i] > 0.0)
      om.noalias() += u_full[i] * (P.col(i) * P.col(i).transpose());
  sol.kkt.stationarity_residual =
      (rho_d * sol.L * om - Eigen::MatrixXd::Identity(rho, rho)).norm();
  double comp = 0.0;
  for (Index i = 0; i < m; ++i)
    comp = std::max(comp, u_full[i] * (1.0 - sol.deltas[i]));
  sol.kkt.complementarity_residual = comp;
  sol.kkt.primal_violation = std::max(0.0, sol.deltas.maxCoeff() - 1.0);
  sol.kkt.dual_violation = std::max(0.0, -u_full.minCoeff());

  // -log det L = log det Omega + rho log rho.
  Eigen::LLT<Eigen::MatrixXd> llt(om);
  sol.objective =
      llt.info() == Eigen::Success
          ? 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum() +
                rho_d * std::log(rho_d)
          : state.logdet + rho_d * std::log(rho_d);
  return sol;
}

}  // namespace

MveeSolution solve_q_full(const Eigen::MatrixXd& P, double tol,
                          double active_tol, Index max_inner) {
  const Index m = P.cols();
  const IndexList seed_set = init_working_set(P);  // also proves rank(P) = rho

  InnerState state;
  state.u = Eigen::VectorXd::Zero(m);
  for (Index i : seed_set) state.u[i] = 1.0 / static_cast<double>(seed_set.size());
  const bool converged = inner_solve(state, P, tol, max_inner);
  MveeSolution sol = assemble(P, state.u, state, active_tol);
  if (!converged)
    throw MveeNonConvergenceError("ellipsoid solve hit the iteration cap",
                                  std::move(sol));
  return sol;
}

MveeSolution solve_q_cutting_plane(const Eigen::MatrixXd& P,
                                   const CuttingPlaneConfig& cfg,
                                   std::ostream* trace) {
  if (!(cfg.theta < 1.0) || !(cfg.eta >= 1.0) || !(cfg.tol > 0.0))
    throw InputError("cutting-plane configuration out of range");
  const Index rho = P.rows();
  const Index m = P.cols();
  const double rho_d = static_cast<double>(rho);

  if (trace) *trace << "iter,working_set_size,max_delta,objective\n";

  if (m <= 2 * rho) {
    MveeSolution sol =
        solve_q_full(P, cfg.tol, cfg.active_tol, cfg.max_inner);
    if (trace)
      *trace << 1 << ',' << m << ',' << sol.deltas.maxCoeff() << ','
             << sol.objective << '\n';
    return sol;
  }

  IndexList working = init_working_set(P);
  Eigen::VectorXd u_work =
      Eigen::VectorXd::Constant(static_cast<Index>(working.size()),
                                1.0 / static_cast<double>(working.size()));
  const Index batch = std::max<Index>(
      1, static_cast<Index>(std::ceil(
             static_cast<double>(m - 2 * rho) / cfg.eta)));

  Index total_inner = 0;
  for (Index outer = 1; outer <= cfg.max_outer; ++outer) {
    Eigen::MatrixXd Pw(rho, static_cast<Index>(working.size()));
    for (std::size_t t = 0; t < working.size(); ++t)
      Pw.col(static_cast<Index>(t)) = P.col(working[t]);

    InnerState state;
    state.u = u_work;
    const bool converged = inner_solve(state, Pw, cfg.tol, cfg.max_inner);
    total_inner += state.iterations;
    if (!converged) {
      Eigen::VectorXd u_full = Eigen::VectorXd::Zero(m);
      for (std::size_t t = 0; t < working.size(); ++t)
        u_full[working[t]] = state.u[static_cast<Index>(t)];
      throw MveeNonConvergenceError(
          "ellipsoid solve hit the inner iteration cap",
          assemble(P, u_full, state, cfg.active_tol));
    }

    const Eigen::MatrixXd L = state.inv / rho_d;
    const Eigen::VectorXd deltas = all_deltas(L, P);

    if (trace)
      *trace << outer << ',' << working.size() << ',' << deltas.maxCoeff()
             << ',' << state.logdet + rho_d * std::log(rho_d) << '\n';

    // Violators outside the working set.
    std::vector<char> in_working(static_cast<std::size_t>(m), 0);
    for (Index i : working) in_working[static_cast<std::size_t>(i)] = 1;
    IndexList violators;
    for (Index i = 0; i < m; ++i)
      if (!in_working[static_cast<std::size_t>(i)] &&
          deltas[i] > 1.0 + cfg.tol)
        violators.push_back(i);

    if (violators.empty()) {
      Eigen::VectorXd u_full = Eigen::VectorXd::Zero(m);
      for (std::size_t t = 0; t < working.size(); ++t)
        u_full[working[t]] = state.u[static_cast<Index>(t)];
      MveeSolution sol = assemble(P, u_full, state, cfg.active_tol);
      sol.inner_iterations = total_inner;
      sol.outer_iterations = outer;
      return sol;
    }

    // Expand: largest-delta violators first, index ascending on ties.
    std::sort(violators.begin(), violators.end(), [&](Index a, Index b) {
      if (deltas[a] != deltas[b]) return deltas[a] > deltas[b];
      return a < b;
    });
    if (static_cast<Index>(violators.size()) > batch)
      violators.resize(static_cast<std::size_t>(batch));

    // Shrink: retire interior points, but never a support point.
    IndexList next;
    std::vector<double> next_u;
    for (std::size_t t = 0; t < working.size(); ++t) {
      const double weight = state.u[static_cast<Index>(t)];
      const Index i = working[t];
      if (weight > 0.0 || deltas[i] > cfg.theta) {
        next.push_back(i);
        next_u.push_back(weight);
      }
    }
    for (Index i : violators) {
      next.push_back(i);
      next_u.push_back(0.0);
    }

    // Keep deterministic ascending order.
    IndexList order(next.size());
    for (std::size_t t = 0; t < order.size(); ++t)
      order[t] = static_cast<Index>(t);
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return next[static_cast<std::size_t>(a)] <
                                             next[static_cast<std::size_t>(b)]; });
    working.clear();
    u_work.resize(static_cast<Index>(order.size()));
    for (std::size_t t = 0; t < order.size(); ++t) {
      working.push_back(next[static_cast<std::size_t>(order[t])]);
      u_work[static_cast<Index>(t)] = next_u[static_cast<std::size_t>(order[t])];
    }
    const double total = u_work.sum();
    if (total > 0.0) u_work /= total;
  }
  throw NumericalError("cutting-plane outer loop hit the iteration cap");
}

IndexList active_points(const MveeSolution& sol, double active_tol) {
  IndexList out;
  for (Index i = 0; i < sol.deltas.size(); ++i)
    if (sol.deltas[i] >= 1.0 - active_tol) out.push_back(i);
  return out;
}

}  // namespace ernmf
