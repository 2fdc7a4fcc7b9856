#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "webcfg/app/corpus.hpp"
#include "webcfg/app/evaluation.hpp"
#include "webcfg/sched/runtime.hpp"

namespace webcfg::app {

/// Measured runtime cost of the prediction path over a set of sessions.
struct OverheadProfile {
  std::size_t sessions = 0;
  std::map<std::string, double> mean_ms;  // per phase, per session
  std::map<std::string, double> max_ms;
  double max_decision_ms = 0.0;  // extraction + prediction + frequency setting, worst session
  std::string largest_page;
  double largest_page_kb = 0.0;
  double largest_page_decision_ms = 0.0;
};

/// Runs a session per page (the first `max_pages` plus the largest page).
OverheadProfile profile_overheads(const CorpusManifest& manifest,
                                  std::shared_ptr<const learn::MulticlassSvmModel> model,
                                  const device::CostModelParams& params, std::size_t chunk_size,
                                  std::size_t max_pages = 20);

nlohmann::ordered_json to_json(const OverheadProfile& profile);
OverheadProfile overhead_profile_from_json(const nlohmann::ordered_json& doc);

/// Human-readable improvement: speedup for time, percent reduction otherwise.
std::string describe_improvement(device::Metric metric, double ratio_vs_hmp);

/// Writes summary.txt and the per-metric data files into `out`; returns the
/// summary text.
std::string write_report(std::span<const EvaluationReport> reports, const OverheadProfile* overheads,
                         const std::filesystem::path& out);

}  // namespace webcfg::app
