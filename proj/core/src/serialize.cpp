#include "ernmf/serialize.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace ernmf {

namespace {

using nlohmann::ordered_json;

ordered_json one_based(const IndexList& idx) {
  ordered_json out = ordered_json::array();
  for (Index i : idx) out.push_back(i + 1);
  return out;
}

ordered_json kkt_json(const KktReport& kkt) {
  ordered_json out;
  out["stationarity"] = kkt.stationarity_residual;
  out["complementarity"] = kkt.complementarity_residual;
  out["primal_violation"] = kkt.primal_violation;
  out["dual_violation"] = kkt.dual_violation;
  return out;
}

ordered_json matrix_json(const Eigen::MatrixXd& M) {
  ordered_json rows = ordered_json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

ordered_json mvee_json(const MveeSolution& sol, bool with_arrays) {
  ordered_json out;
  out["rho"] = sol.L.rows();
  out["point_count"] = sol.u.size();
  out["objective"] = sol.objective;
  out["inner_iterations"] = sol.inner_iterations;
  out["outer_iterations"] = sol.outer_iterations;
  out["active_count"] = sol.active_indices.size();
  out["active_indices"] = one_based(sol.active_indices);
  out["kkt"] = kkt_json(sol.kkt);
  if (with_arrays) {
    out["L"] = matrix_json(sol.L);
    out["weights"] = vector_json(sol.u);
    out["deltas"] = vector_json(sol.deltas);
  }
  return out;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string mvee_report_json(const MveeSolution& sol) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["mvee"] = mvee_json(sol, true);
  return dump(doc);
}

std::string er_report_json(const ErResult& res,
                           const InstanceDiagnostics* diag) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["indices"] = one_based(res.indices);
  doc["candidate_set"] = one_based(res.candidate_set);
  doc["rho_used"] = res.rho_used;
  doc["selector_used"] =
      res.selector_used ? selector_name(*res.selector_used) : "none";
  if (diag) {
    ordered_json d;
    d["sigma"] = diag->sigma;
    d["mu"] = diag->mu;
    d["epsilon"] = diag->epsilon;
    // Unknown noise is an explicit null, never a missing key.
    if (std::isfinite(diag->noise_norm))
      d["noise_norm"] = diag->noise_norm;
    else
      d["noise_norm"] = nullptr;
    doc["diagnostics"] = std::move(d);
  } else {
    doc["diagnostics"] = nullptr;
  }
  doc["mvee"] = mvee_json(res.mvee, false);
  return dump(doc);
}

std::string sweep_report_json(const SweepReport& report, bool include_timing) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["d"] = report.d;
  doc["m"] = report.m;
  doc["r"] = report.r;
  doc["trials"] = report.trials;
  doc["master_seed"] = report.master_seed;
  doc["deltas"] = report.deltas;
  doc["levels"] = SweepReport::kLevels;
  ordered_json algos = ordered_json::array();
  for (const AlgorithmSweep& sweep : report.algorithms) {
    ordered_json entry;
    entry["tag"] = sweep.tag;
    ordered_json recovery = ordered_json::array();
    ordered_json failures = ordered_json::array();
    ordered_json active = ordered_json::array();
    ordered_json timing = ordered_json::array();
    for (const CellStats& cell : sweep.cells) {
      recovery.push_back(cell.mean_recovery);
      failures.push_back(cell.failures);
      if (cell.mean_active_points)
        active.push_back(*cell.mean_active_points);
      else
        active.push_back(nullptr);
      timing.push_back(cell.mean_seconds);
    }
    entry["mean_recovery"] = std::move(recovery);
    entry["failures"] = std::move(failures);
    entry["mean_active_points"] = std::move(active);
    if (include_timing) entry["mean_seconds"] = std::move(timing);
    ordered_json thresholds;
    for (std::size_t level = 0; level < SweepReport::kLevels.size(); ++level) {
      const std::string key = std::to_string(SweepReport::kLevels[level]);
      if (sweep.thresholds[level])
        thresholds[key] = *sweep.thresholds[level];
      else
        thresholds[key] = nullptr;
    }
    entry["thresholds"] = std::move(thresholds);
    ordered_json rises = ordered_json::array();
    for (Index di : sweep.non_monotonic)
      rises.push_back(report.deltas[static_cast<std::size_t>(di)]);
    entry["non_monotonic"] = std::move(rises);
    algos.push_back(std::move(entry));
  }
  doc["algorithms"] = std::move(algos);
  return dump(doc);
}

std::string sweep_report_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "algorithm";
  for (int level : SweepReport::kLevels) out << "," << level;
  out << "\n";
  for (const AlgorithmSweep& sweep : report.algorithms) {
    out << sweep.tag;
    for (std::size_t level = 0; level < SweepReport::kLevels.size(); ++level) {
      out << ",";
      if (sweep.thresholds[level])
        out << format_value(*sweep.thresholds[level]);
      else
        out << "-";
    }
    out << "\n";
  }
  return out.str();
}

std::string cluster_report_json(const ClusterReport& report) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["r"] = report.anchor_indices.size();
  doc["used_low_rank"] = report.used_low_rank;
  doc["candidate_count"] = report.candidate_count;
  doc["zero_row_warnings"] = report.zero_row_warnings;
  doc["anchor_indices"] = one_based(report.anchor_indices);
  if (!report.anchor_words.empty())
    doc["anchor_words"] = report.anchor_words;
  else
    doc["anchor_words"] = nullptr;
  ordered_json tops = ordered_json::array();
  for (const IndexList& row : report.top_word_indices)
    tops.push_back(one_based(row));
  doc["top_word_indices"] = std::move(tops);
  if (!report.top_words.empty())
    doc["top_words"] = report.top_words;
  else
    doc["top_words"] = nullptr;
  if (report.ac >= 0.0) {
    doc["ac"] = report.ac;
    doc["nmi"] = report.nmi;
  } else {
    doc["ac"] = nullptr;
    doc["nmi"] = nullptr;
  }
  ordered_json assignments = ordered_json::array();
  for (Index id : report.assignments) assignments.push_back(id);
  doc["assignments"] = std::move(assignments);
  return dump(doc);
}

}  // namespace ernmf
