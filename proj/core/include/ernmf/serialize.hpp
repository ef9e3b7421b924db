#pragma once

#include <string>

#include "ernmf/docclust.hpp"
#include "ernmf/er.hpp"
#include "ernmf/evalbench.hpp"
#include "ernmf/mvee.hpp"

// Report writers.  Every document carries "schema_version" and uses 1-based
// indices; emission order is fixed so identical results give identical bytes.

namespace ernmf {

inline constexpr int kSchemaVersion = 1;

std::string mvee_report_json(const MveeSolution& sol);
std::string er_report_json(const ErResult& res,
                           const InstanceDiagnostics* diag = nullptr);
// Timing means are volatile across runs, so they are opt-in.
std::string sweep_report_json(const SweepReport& report,
                              bool include_timing = false);
// Threshold table, one row per algorithm, one column per recovery level.
std::string sweep_report_csv(const SweepReport& report);
std::string cluster_report_json(const ClusterReport& report);

}  // namespace ernmf
