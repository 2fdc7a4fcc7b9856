#include "webcfg/device/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "webcfg/error.hpp"

namespace webcfg::device {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double unit_interval(std::uint64_t bits) {
  // 53 random mantissa bits, strictly inside (0, 1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

constexpr double kMinThrottle = 0.05;

#define WEBCFG_PARAM_FIELDS(X) \
  X(ipc_big)                   \
  X(ipc_little)                \
  X(alpha_aux)                 \
  X(p_stat_big)                \
  X(p_stat_little)             \
  X(kappa_big)                 \
  X(kappa_little)              \
  X(throttle_knee)             \
  X(throttle_slope)            \
  X(thermal_drop)              \
  X(thermal_half_work)         \
  X(platform_w)                \
  X(big_wake_j)                \
  X(beta0)                     \
  X(beta1)                     \
  X(beta2)                     \
  X(beta3)                     \
  X(beta4)                     \
  X(beta5)                     \
  X(noise_sigma)

}  // namespace

void CostModelParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive");
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be non-negative");
  };
  positive(ipc_big, "ipc_big");
  positive(ipc_little, "ipc_little");
  positive(alpha_aux, "alpha_aux");
  positive(p_stat_big, "p_stat_big");
  positive(p_stat_little, "p_stat_little");
  positive(kappa_big, "kappa_big");
  positive(kappa_little, "kappa_little");
  positive(throttle_knee, "throttle_knee");
  positive(throttle_slope, "throttle_slope");
  positive(beta0, "beta0");
  non_negative(thermal_drop, "thermal_drop");
  positive(thermal_half_work, "thermal_half_work");
  non_negative(platform_w, "platform_w");
  non_negative(big_wake_j, "big_wake_j");
  for (double b : {beta1, beta2, beta3, beta4, beta5}) non_negative(b, "beta coefficients");
  non_negative(noise_sigma, "noise_sigma");
  if (throttle_knee > kBigMaxMhz / 1000.0) throw ValidationError("throttle_knee must be <= 2.0 GHz");
}

CostModelParams CostModelParams::without_noise() const {
  CostModelParams copy = *this;
  copy.noise_sigma = 0.0;
  return copy;
}

nlohmann::ordered_json to_json(const CostModelParams& params) {
  nlohmann::ordered_json doc;
#define WEBCFG_TO_JSON(name) doc[#name] = params.name;
  WEBCFG_PARAM_FIELDS(WEBCFG_TO_JSON)
#undef WEBCFG_TO_JSON
  doc["seed"] = params.seed;
  return doc;
}

CostModelParams params_from_json(const nlohmann::ordered_json& doc) {
  if (!doc.is_object()) throw ValidationError("cost model parameters must be a JSON object");
  CostModelParams params;
  std::size_t known = 0;
  try {
#define WEBCFG_FROM_JSON(name)                     \
  if (doc.contains(#name)) {                       \
    params.name = doc.at(#name).get<double>();     \
    ++known;                                       \
  }
    WEBCFG_PARAM_FIELDS(WEBCFG_FROM_JSON)
#undef WEBCFG_FROM_JSON
    if (doc.contains("seed")) {
      params.seed = doc.at("seed").get<std::uint64_t>();
      ++known;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad cost model parameter: ") + e.what());
  }
  if (known != doc.size()) throw ValidationError("unknown key in cost model parameters");
  params.validate();
  return params;
}

double WorkloadCost::value(Metric metric) const {
  switch (metric) {
    case Metric::kLoadTime: return load_time;
    case Metric::kEnergy: return energy;
    case Metric::kEdp: return edp;
  }
  return load_time;
}

std::uint64_t page_key(std::string_view page_id) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : page_id) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

double workload_weight(const features::FeatureVector& raw, const CostModelParams& params) {
  if (raw.normalized) throw ValidationError("workload weight needs a raw feature vector");
  using namespace features;
  const double heavy = raw[index::tag("img")] + raw[index::tag("table")] + raw[index::tag("iframe")];
  return params.beta0 + params.beta1 * raw[index::dom_nodes()] +
         params.beta2 * raw[index::style_rules()] + params.beta3 * raw[index::page_size_kb()] +
         params.beta4 * raw[index::dom_depth()] + params.beta5 * heavy;
}

double effective_knee(double work, const CostModelParams& params) {
  return params.throttle_knee - params.thermal_drop * work / (work + params.thermal_half_work);
}

double core_speed(Core core, double ghz, double knee, const CostModelParams& params) {
  if (core == Core::kLittle) return params.ipc_little * ghz;
  const double theta = std::max(kMinThrottle, 1.0 - params.throttle_slope * std::max(0.0, ghz - knee));
  return params.ipc_big * ghz * theta;
}

double core_power(Core core, double ghz, const CostModelParams& params) {
  return core == Core::kBig ? params.p_stat_big + params.kappa_big * ghz * ghz * ghz
                            : params.p_stat_little + params.kappa_little * ghz * ghz * ghz;
}

double noise_factor(const CostModelParams& params, const ProcessorConfig& config, NoiseKey key) {
  if (params.noise_sigma <= 0.0) return 1.0;
  std::uint64_t state = splitmix64(params.seed);
  state = splitmix64(state ^ key.page);
  state = splitmix64(state ^ config_index(config));
  state = splitmix64(state ^ key.repetition);
  const double u1 = unit_interval(splitmix64(state));
  const double u2 = unit_interval(splitmix64(state ^ 0xD1B54A32D192ED03ull));
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return std::exp(params.noise_sigma * z);
}

WorkloadCost evaluate_work(double work, const ProcessorConfig& config, const CostModelParams& params,
                           double render_scale) {
  const Core render = config.render_core;
  const Core other = render == Core::kBig ? Core::kLittle : Core::kBig;
  const double f_render = render == Core::kBig ? config.big_ghz() : config.little_ghz();
  const double f_other = render == Core::kBig ? config.little_ghz() : config.big_ghz();
  const double p_stat_render = render == Core::kBig ? params.p_stat_big : params.p_stat_little;
  const double p_stat_other = render == Core::kBig ? params.p_stat_little : params.p_stat_big;
  const double knee = effective_knee(work, params);

  const double t_render = render_scale * work / core_speed(render, f_render, knee, params);
  const double t_aux = params.alpha_aux * work / core_speed(other, f_other, knee, params);

  WorkloadCost cost;
  cost.load_time = t_render + t_aux;
  cost.energy = t_render * (core_power(render, f_render, params) + p_stat_other) +
                t_aux * (core_power(other, f_other, params) + p_stat_render) +
                params.platform_w * cost.load_time +
                (render == Core::kBig ? params.big_wake_j : 0.0);
  cost.edp = cost.energy * cost.load_time;
  return cost;
}

WorkloadCost evaluate(const features::FeatureVector& raw, const ProcessorConfig& config,
                      const CostModelParams& params, NoiseKey key) {
  require_on_grid(config);
  return evaluate_work(workload_weight(raw, params), config, params,
                       noise_factor(params, config, key));
}

}  // namespace webcfg::device
