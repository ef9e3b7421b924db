#include "ernmf/evalbench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>
#include <utility>

#include "ernmf/baselines.hpp"
#include "ernmf/rng.hpp"
#include "ernmf/svd.hpp"

namespace ernmf {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

IndexList sorted_unique(const IndexList& v) {
  IndexList out = v;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DataMatrix assemble(const MatrixXd& F, const MatrixXd& K,
                    const std::vector<Index>& perm, const MatrixXd& N) {
  const Index d = F.rows();
  const Index r = F.cols();
  const Index m = static_cast<Index>(perm.size());
  MatrixXd A(d, m);
  for (Index j = 0; j < r; ++j) A.col(perm[static_cast<std::size_t>(j)]) = F.col(j);
  if (K.cols() > 0) {
    const MatrixXd FK = F * K;
    for (Index j = 0; j < K.cols(); ++j)
      A.col(perm[static_cast<std::size_t>(r + j)]) = FK.col(j);
  }
  A += N;
  return DataMatrix::dense(std::move(A));
}

}  // namespace

SyntheticInstance gen_synthetic(Index d, Index m, Index r, double delta,
                                std::uint64_t seed) {
  if (r < 1 || r > std::min(d, m))
    throw InputError("gen_synthetic: need 1 <= r <= min(d, m)");
  if (!(delta >= 0.0))
    throw InputError("gen_synthetic: delta must be nonnegative");
  rng::Stream stream(seed);

  SyntheticInstance inst;
  inst.delta = delta;
  inst.seed = seed;
  inst.F.resize(d, r);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < d; ++i) inst.F(i, j) = stream.uniform01();

  VectorXd alpha(r);
  for (Index i = 0; i < r; ++i) alpha[i] = std::max(stream.uniform01(), 1e-12);
  const Index ell = m - r;
  inst.K.resize(r, ell);
  for (Index j = 0; j < ell; ++j) inst.K.col(j) = stream.dirichlet(alpha);

  inst.perm = stream.permutation(m);
  inst.N.resize(d, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < d; ++i) inst.N(i, j) = delta * stream.gauss();

  inst.M = assemble(inst.F, inst.K, inst.perm, inst.N);
  inst.true_indices.assign(inst.perm.begin(), inst.perm.begin() + r);
  std::sort(inst.true_indices.begin(), inst.true_indices.end());
  return inst;
}

SyntheticInstance rescale_noise(const SyntheticInstance& inst,
                                double target_spectral_norm) {
  if (!(target_spectral_norm >= 0.0))
    throw InputError("rescale_noise: target must be nonnegative");
  const double current = spectral_norm(DataMatrix::dense(inst.N));
  if (!(current > 0.0))
    throw InputError("rescale_noise: instance has no noise to rescale");
  SyntheticInstance out = inst;
  out.N *= target_spectral_norm / current;
  out.M = assemble(out.F, out.K, out.perm, out.N);
  return out;
}

InstanceDiagnostics diagnostics(const SyntheticInstance& inst) {
  InstanceDiagnostics diag = epsilon_bound(inst.F, inst.K);
  diag.noise_norm = spectral_norm(DataMatrix::dense(inst.N));
  return diag;
}

double recovery_rate(const IndexList& truth, const IndexList& estimate) {
  const IndexList a = sorted_unique(truth);
  const IndexList b = sorted_unique(estimate);
  if (a.empty()) throw InputError("recovery_rate: truth set is empty");
  IndexList common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(a.size());
}

double residual_check(const SyntheticInstance& inst, const IndexList& I,
                      double nnls_tol) {
  const MatrixXd W = weight_matrix(inst.M, I, nnls_tol);
  MatrixXd resid = inst.M.gather_cols(I) * W;
  resid -= inst.M.to_dense();
  return resid.colwise().norm().maxCoeff();
}

PipelineSpec parse_pipeline_tag(const std::string& tag) {
  PipelineSpec spec;
  std::string selector = tag;
  if (tag.rfind("er-", 0) == 0) {
    spec.use_er = true;
    selector = tag.substr(3);
  }
  spec.selector.algorithm = parse_selector(selector);
  return spec;
}

IndexList run_pipeline(const DataMatrix& M, Index r, const PipelineSpec& spec,
                       Index* active_count) {
  if (active_count) *active_count = 0;
  IndexList out;
  if (spec.use_er) {
    const ErResult res = er_practical(M, r, r, spec.selector);
    if (active_count)
      *active_count = static_cast<Index>(res.candidate_set.size());
    out = res.indices;
  } else {
    out = select_columns(M, r, spec.selector);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SweepReport run_sweep(const SweepConfig& cfg) {
  if (cfg.trials < 1) throw InputError("run_sweep: trials must be >= 1");
  if (cfg.deltas.empty()) throw InputError("run_sweep: empty delta grid");
  for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
    if (!(cfg.deltas[i] >= 0.0))
      throw InputError("run_sweep: deltas must be >= 0");
    if (i > 0 && !(cfg.deltas[i] > cfg.deltas[i - 1]))
      throw InputError("run_sweep: delta grid must be strictly increasing");
  }
  if (cfg.algorithms.empty())
    throw InputError("run_sweep: no algorithms given");
  std::vector<PipelineSpec> specs;
  specs.reserve(cfg.algorithms.size());
  for (const std::string& tag : cfg.algorithms)
    specs.push_back(parse_pipeline_tag(tag));

  const std::size_t n_algos = specs.size();
  const std::size_t n_deltas = cfg.deltas.size();
  const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t n_cells = n_deltas * n_trials;

  struct TrialCell {
    double recovery = 0.0;
    double active = 0.0;
    double seconds = 0.0;
    bool failed = false;
  };
  // slots[algo][delta * trials + trial]: written by exactly one task each, so
  // aggregation is independent of scheduling.
  std::vector<std::vector<TrialCell>> slots(
      n_algos, std::vector<TrialCell>(n_cells));

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t cell = cursor.fetch_add(1);
      if (cell >= n_cells) return;
      const std::size_t trial = cell / n_deltas;
      const std::size_t di = cell % n_deltas;
      const std::uint64_t inst_seed =
          rng::derive(cfg.master_seed, 0x1457a7ce, trial, di);
      const SyntheticInstance inst =
          gen_synthetic(cfg.d, cfg.m, cfg.r, cfg.deltas[di], inst_seed);
      for (std::size_t a = 0; a < n_algos; ++a) {
        PipelineSpec spec = specs[a];
        spec.selector.seed =
            rng::derive(cfg.master_seed, 0xa1600000ULL + a, trial, di);
        TrialCell& slot = slots[a][di * n_trials + trial];
        const auto start = std::chrono::steady_clock::now();
        try {
          Index active = 0;
          const IndexList picked = run_pipeline(inst.M, cfg.r, spec, &active);
          slot.recovery = recovery_rate(inst.true_indices, picked);
          slot.active = static_cast<double>(active);
        } catch (const std::exception&) {
          slot.failed = true;
        }
        slot.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
      }
    }
  };

  std::size_t n_threads = cfg.threads > 0
                              ? static_cast<std::size_t>(cfg.threads)
                              : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, n_cells);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  SweepReport report;
  report.d = cfg.d;
  report.m = cfg.m;
  report.r = cfg.r;
  report.trials = cfg.trials;
  report.master_seed = cfg.master_seed;
  report.deltas = cfg.deltas;
  report.algorithms.resize(n_algos);
  for (std::size_t a = 0; a < n_algos; ++a) {
    AlgorithmSweep& sweep = report.algorithms[a];
    sweep.tag = cfg.algorithms[a];
    sweep.cells.resize(n_deltas);
    for (std::size_t di = 0; di < n_deltas; ++di) {
      CellStats& cell = sweep.cells[di];
      double rec_sum = 0.0, active_sum = 0.0, sec_sum = 0.0;
      int ok = 0;
      for (std::size_t trial = 0; trial < n_trials; ++trial) {
        const TrialCell& slot = slots[a][di * n_trials + trial];
        sec_sum += slot.seconds;
        if (slot.failed) {
          ++cell.failures;
          continue;
        }
        rec_sum += slot.recovery;
        active_sum += slot.active;
        ++ok;
      }
      cell.mean_recovery = ok > 0 ? rec_sum / ok : 0.0;
      cell.mean_seconds = sec_sum / static_cast<double>(n_trials);
      if (specs[a].use_er && ok > 0) cell.mean_active_points = active_sum / ok;
    }
    for (std::size_t level = 0; level < SweepReport::kLevels.size(); ++level) {
      const double need =
          static_cast<double>(SweepReport::kLevels[level]) / 100.0 - 1e-12;
      for (std::size_t di = 0; di < n_deltas; ++di)
        if (sweep.cells[di].mean_recovery >= need)
          sweep.thresholds[level] = cfg.deltas[di];
    }
    for (std::size_t di = 1; di < n_deltas; ++di)
      if (sweep.cells[di].mean_recovery >
          sweep.cells[di - 1].mean_recovery + 1e-12)
        sweep.non_monotonic.push_back(static_cast<Index>(di));
  }
  return report;
}

}  // namespace ernmf
