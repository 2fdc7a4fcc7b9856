#pragma once

#include <span>
#include <vector>

#include "webcfg/device/config.hpp"
#include "webcfg/device/cost_model.hpp"

namespace webcfg::device {

struct OracleResult {
  ProcessorConfig config;
  WorkloadCost cost;
};

/// Noise-free cost of every configuration, in enumerate_configs() order.
std::vector<WorkloadCost> all_costs(const features::FeatureVector& raw, const CostModelParams& params);

/// Exhaustive argmin of `metric` over all 374 configurations on the
/// noise-free model; ties go to the earliest configuration.
OracleResult oracle_best(const features::FeatureVector& raw, Metric metric,
                         const CostModelParams& params);
OracleResult oracle_best(std::span<const WorkloadCost> costs, Metric metric);

/// The Linux HMP stand-in: rendering on big, both clusters at maximum.
ProcessorConfig hmp_baseline();

struct FixedConfigScore {
  ProcessorConfig config;
  double geomean_ratio = 0.0;  // geometric mean over pages of metric(config) / metric(HMP)
};

/// Applies each configuration to every page and aggregates against HMP.
/// Throws ValidationError on an empty corpus or empty label set.
std::vector<FixedConfigScore> fixed_config_sweep(std::span<const features::FeatureVector> corpus,
                                                 std::span<const ProcessorConfig> labels,
                                                 Metric metric, const CostModelParams& params);

}  // namespace webcfg::device
