#pragma once

#include <cstdint>
#include <string_view>

#include <json.hpp>

#include "webcfg/device/config.hpp"
#include "webcfg/features/schema.hpp"

namespace webcfg::device {

/// Parameters of the simulated big.LITTLE platform.
///
/// Work W (work units) is a linear function of page features. A core at
/// f GHz retires ipc * f * theta work units per second, where theta < 1
/// above the throttle knee on the big core. The knee itself drops as pages
/// get heavier (longer, hotter renders), by up to `thermal_drop` GHz with
/// half of that reached at W = `thermal_half_work`. Power is static plus
/// kappa * f^3 per core, plus a platform draw over the whole load and a
/// one-off energy for waking the big cluster when it renders.
///
/// With thermal_drop, platform_w and big_wake_j all zero the model reduces
/// to a page-independent optimum per metric.
struct CostModelParams {
  double ipc_big = 2.0;
  double ipc_little = 1.0;
  double alpha_aux = 0.05;
  double p_stat_big = 0.3;
  double p_stat_little = 0.05;
  double kappa_big = 1.0;
  double kappa_little = 0.15;
  double throttle_knee = 1.8;
  double throttle_slope = 0.5;
  double thermal_drop = 1.0;
  double thermal_half_work = 120.0;
  double platform_w = 1.5;
  double big_wake_j = 4.0;
  double beta0 = 1.0;
  double beta1 = 0.01;   // per DOM node
  double beta2 = 0.005;  // per style rule
  double beta3 = 0.002;  // per KB
  double beta4 = 0.05;   // per level of depth
  double beta5 = 0.1;    // per img/table/iframe element
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  /// Throws ValidationError when an invariant is violated.
  void validate() const;
  CostModelParams without_noise() const;

  bool operator==(const CostModelParams&) const = default;
};

nlohmann::ordered_json to_json(const CostModelParams& params);
/// Missing keys keep their defaults; unknown keys are rejected.
CostModelParams params_from_json(const nlohmann::ordered_json& doc);

struct WorkloadCost {
  double load_time = 0.0;  // s
  double energy = 0.0;     // J
  double edp = 0.0;        // J*s, always energy * load_time

  double value(Metric metric) const;

  bool operator==(const WorkloadCost&) const = default;
};

/// Identifies one noisy measurement: page, and which repetition.
struct NoiseKey {
  std::uint64_t page = 0;
  std::uint32_t repetition = 0;
};

/// Stable 64-bit key for a page id.
std::uint64_t page_key(std::string_view page_id);

/// W = b0 + b1*nodes + b2*rules + b3*size_kb + b4*depth + b5*(img+table+iframe).
/// Expects a raw (unnormalized) vector.
double workload_weight(const features::FeatureVector& raw, const CostModelParams& params);

double effective_knee(double work, const CostModelParams& params);
/// Work units per second of `core` at `ghz` given the current knee.
double core_speed(Core core, double ghz, double knee, const CostModelParams& params);
double core_power(Core core, double ghz, const CostModelParams& params);

/// Multiplicative log-normal factor exp(sigma * z) for one measurement;
/// 1 when noise is off.
double noise_factor(const CostModelParams& params, const ProcessorConfig& config, NoiseKey key);

/// Cost of rendering `work` units under `config`; `render_scale` multiplies
/// the render-core time (noise).
WorkloadCost evaluate_work(double work, const ProcessorConfig& config, const CostModelParams& params,
                           double render_scale = 1.0);

/// Cost of rendering the page described by `raw` under `config`. Noise, if
/// enabled, is drawn deterministically from (seed, key, config).
/// Throws ValidationError for off-grid configs or normalized input.
WorkloadCost evaluate(const features::FeatureVector& raw, const ProcessorConfig& config,
                      const CostModelParams& params, NoiseKey key = {});

}  // namespace webcfg::device
