#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ernmf/er.hpp"
#include "ernmf/matrix.hpp"
#include "ernmf/types.hpp"

namespace ernmf {

// Noisy separable instance M = F [I K] Pi + N with the ground truth kept
// around for scoring.
struct SyntheticInstance {
  Eigen::MatrixXd F;          // d x r, entries uniform on [0,1]
  Eigen::MatrixXd K;          // r x (m-r), columns Dirichlet
  std::vector<Index> perm;    // perm[j] = destination of pre-permutation col j
  Eigen::MatrixXd N;          // d x m Gaussian noise, std delta
  DataMatrix M;               // assembled data
  IndexList true_indices;     // positions of the basis columns, ascending
  double delta = 0.0;
  std::uint64_t seed = 0;
};

SyntheticInstance gen_synthetic(Index d, Index m, Index r, double delta,
                                std::uint64_t seed);

// Same instance with N scaled so that ||N||_2 equals the target.
SyntheticInstance rescale_noise(const SyntheticInstance& inst,
                                double target_spectral_norm);

// sigma/mu/epsilon of the instance's ground-truth factors plus ||N||_2.
InstanceDiagnostics diagnostics(const SyntheticInstance& inst);

// |truth ∩ estimate| / |truth|.
double recovery_rate(const IndexList& truth, const IndexList& estimate);

// max_i ||M(I) w*_i - m_i||_2 with W* the nonnegative weight fit.
double residual_check(const SyntheticInstance& inst, const IndexList& I,
                      double nnls_tol = 1e-10);

struct SweepConfig {
  std::vector<std::string> algorithms;  // "spa", "xray-max", "er-spa", ...
  std::vector<double> deltas;
  int trials = 10;
  Index d = 50;
  Index m = 1000;
  Index r = 10;
  std::uint64_t master_seed = 0;
  int threads = 0;  // <= 0: hardware concurrency
};

struct CellStats {
  double mean_recovery = 0.0;
  int failures = 0;
  // Mean candidate-set size of the ellipsoid stage; set only for er-* tags.
  std::optional<double> mean_active_points;
  double mean_seconds = 0.0;
};

struct AlgorithmSweep {
  std::string tag;
  std::vector<CellStats> cells;  // one per delta, grid order
  // Largest grid delta whose mean recovery still meets the level; empty when
  // no grid point does.
  std::array<std::optional<double>, 4> thresholds;
  std::vector<Index> non_monotonic;  // delta indices where the mean rises
};

struct SweepReport {
  static constexpr std::array<int, 4> kLevels{100, 90, 80, 70};
  Index d = 0, m = 0, r = 0;
  int trials = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> deltas;
  std::vector<AlgorithmSweep> algorithms;
};

// One instance per (trial, delta) cell, every algorithm scored on it.
// Deterministic for a fixed master seed regardless of the thread count.
SweepReport run_sweep(const SweepConfig& cfg);

// A pipeline tag is a plain selector name ("spa", "xray-greedy", ...) or its
// er-prefixed form ("er-spa", ...) meaning: ellipsoid stage first, then that
// selector over the candidate columns.
struct PipelineSpec {
  bool use_er = false;
  SelectorConfig selector;
};

PipelineSpec parse_pipeline_tag(const std::string& tag);

// Runs the pipeline and returns r indices in ascending order.  For er
// pipelines, active_count (when given) receives the candidate-set size.
IndexList run_pipeline(const DataMatrix& M, Index r, const PipelineSpec& spec,
                       Index* active_count = nullptr);

}  // namespace ernmf
