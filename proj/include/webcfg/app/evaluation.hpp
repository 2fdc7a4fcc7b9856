#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "webcfg/device/oracle.hpp"
#include "webcfg/learn/training.hpp"

namespace webcfg::app {

/// Repeat-until-confident measurement: stop once the full width of the
/// confidence interval of the mean is below `max_ci_ratio` of the mean for
/// both load time and energy.
struct MeasurementProtocol {
  double confidence = 0.95;
  double max_ci_ratio = 0.05;
  std::size_t max_repetitions = 50;
};

/// Full width (upper - lower) of the Student-t confidence interval of the
/// mean. Infinite for fewer than 2 samples.
double ci_width(std::span<const double> samples, double confidence);

struct Measurement {
  device::WorkloadCost mean;  // edp = mean energy * mean load time
  std::size_t repetitions = 1;
  double ci_ratio = 0.0;      // widest CI / mean over load time and energy
  bool met = true;            // criterion reached within the cap

  bool operator==(const Measurement&) const = default;
};

/// One noise-free evaluation when noise is off; otherwise repeats with
/// distinct repetition keys until the protocol is satisfied or capped.
Measurement measure(const features::FeatureVector& raw, const device::ProcessorConfig& config,
                    const device::CostModelParams& params, std::uint64_t page,
                    const MeasurementProtocol& protocol = {});

struct EvaluationRow {
  std::string page_id;
  device::ProcessorConfig predicted;
  device::ProcessorConfig oracle;
  Measurement hmp;
  Measurement predicted_cost;
  Measurement oracle_cost;
  double oracle_fraction = 1.0;  // noise-free oracle value / predicted value, <= 1
  bool correct = false;
};

struct Aggregates {
  double accuracy = 0.0;
  double predicted_vs_hmp = 0.0;  // geometric mean of predicted / HMP
  double oracle_vs_hmp = 0.0;
  double oracle_fraction = 0.0;   // geometric mean of the per-page fractions
  double min_ratio = 0.0;         // predicted / HMP over pages
  double max_ratio = 0.0;
  std::size_t measurements = 0;
  std::size_t repetitions_total = 0;
  std::size_t repetitions_max = 0;
  double ci_met_fraction = 1.0;
  double max_ci_ratio = 0.0;
};

/// Recomputes every aggregate from the rows. Throws ValidationError on no rows.
Aggregates aggregate(device::Metric metric, std::span<const EvaluationRow> rows);

enum class EvalMode { kLoocv, kHoldout };
std::string_view to_string(EvalMode mode);
EvalMode parse_mode(std::string_view text);

struct EvaluationOptions {
  EvalMode mode = EvalMode::kLoocv;
  learn::LoocvOptions loocv;
  MeasurementProtocol protocol;
  /// Holdout: every `holdout_stride`-th page (by position) is held out.
  std::size_t holdout_stride = 4;
};

struct HistogramEntry {
  device::ProcessorConfig config;
  std::size_t oracle_count = 0;
  std::size_t predicted_count = 0;
};

struct ImportanceEntry {
  std::string feature;
  double gain_ratio = 0.0;
};

struct EvaluationReport {
  device::Metric metric = device::Metric::kLoadTime;
  EvalMode mode = EvalMode::kLoocv;
  device::CostModelParams params;
  learn::GridChoice hyper;
  std::vector<EvaluationRow> rows;  // page id order
  Aggregates aggregates;
  learn::LabelSet labels;  // distinct optima over the whole corpus
  std::vector<HistogramEntry> histogram;
  std::vector<device::FixedConfigScore> sweep;  // each label applied to every page
  std::vector<ImportanceEntry> importance;     // schema order, 73 entries
};

/// Evaluates each metric; LOOCV folds are shared across metrics.
std::vector<EvaluationReport> evaluate(std::span<const learn::PageFeatures> corpus,
                                       std::span<const device::Metric> metrics,
                                       const device::CostModelParams& params,
                                       const EvaluationOptions& options = {});

nlohmann::ordered_json to_json(const EvaluationReport& report);
/// Throws ValidationError on malformed input.
EvaluationReport report_from_json(const nlohmann::ordered_json& doc);

/// One line per page; the header names every column.
std::string rows_csv(const EvaluationReport& report);

}  // namespace webcfg::app
