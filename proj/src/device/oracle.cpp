#include "webcfg/device/oracle.hpp"

#include "webcfg/error.hpp"
#include "webcfg/stats.hpp"

namespace webcfg::device {

std::vector<WorkloadCost> all_costs(const features::FeatureVector& raw, const CostModelParams& params) {
  const CostModelParams quiet = params.without_noise();
  const double work = workload_weight(raw, quiet);
  std::vector<WorkloadCost> costs;
  costs.reserve(kConfigCount);
  for (const auto& config : enumerate_configs()) costs.push_back(evaluate_work(work, config, quiet));
  return costs;
}

OracleResult oracle_best(std::span<const WorkloadCost> costs, Metric metric) {
  if (costs.size() != kConfigCount) throw ValidationError("expected one cost per configuration");
  std::size_t best = 0;
  for (std::size_t i = 1; i < costs.size(); ++i) {
    if (costs[i].value(metric) < costs[best].value(metric)) best = i;
  }
  return {enumerate_configs()[best], costs[best]};
}

OracleResult oracle_best(const features::FeatureVector& raw, Metric metric,
                         const CostModelParams& params) {
  return oracle_best(all_costs(raw, params), metric);
}

ProcessorConfig hmp_baseline() { return {Core::kBig, kBigMaxMhz, kLittleMaxMhz}; }

std::vector<FixedConfigScore> fixed_config_sweep(std::span<const features::FeatureVector> corpus,
                                                 std::span<const ProcessorConfig> labels,
                                                 Metric metric, const CostModelParams& params) {
  if (corpus.empty()) throw ValidationError("fixed-configuration sweep needs a non-empty corpus");
  if (labels.empty()) throw ValidationError("fixed-configuration sweep needs at least one configuration");
  const CostModelParams quiet = params.without_noise();
  std::vector<FixedConfigScore> out;
  for (const auto& config : labels) {
    std::vector<double> ratios;
    ratios.reserve(corpus.size());
    for (const auto& page : corpus) {
      ratios.push_back(evaluate(page, config, quiet).value(metric) /
                       evaluate(page, hmp_baseline(), quiet).value(metric));
    }
    out.push_back({config, geometric_mean(ratios)});
  }
  return out;
}

}  // namespace webcfg::device
