#include "webcfg/device/config.hpp"

#include <charconv>
#include <cmath>

#include "webcfg/error.hpp"

namespace webcfg::device {

namespace {

bool valid_mhz(int mhz, int max_mhz) {
  return mhz >= kMinMhz && mhz <= max_mhz && (mhz - kMinMhz) % kStepMhz == 0;
}

std::string ghz_text(int mhz) {
  std::string out = std::to_string(mhz / 1000) + "." + std::to_string((mhz % 1000) / 100);
  if (mhz % 100 != 0) out += std::to_string((mhz % 100) / 10);
  return out;
}

int parse_ghz(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("bad frequency '" + std::string(text) + "'");
  }
  return static_cast<int>(std::lround(value * 1000.0));
}

}  // namespace

std::string_view to_string(Core core) { return core == Core::kBig ? "big" : "little"; }

bool on_grid(const ProcessorConfig& config) {
  return valid_mhz(config.big_mhz, kBigMaxMhz) && valid_mhz(config.little_mhz, kLittleMaxMhz);
}

void require_on_grid(const ProcessorConfig& config) {
  if (!on_grid(config)) throw ValidationError("configuration off the frequency grid: " + to_string(config));
}

std::size_t config_index(const ProcessorConfig& config) {
  require_on_grid(config);
  const std::size_t core = config.render_core == Core::kBig ? 0 : 1;
  const auto b = static_cast<std::size_t>((config.big_mhz - kMinMhz) / kStepMhz);
  const auto l = static_cast<std::size_t>((config.little_mhz - kMinMhz) / kStepMhz);
  return (core * kBigSteps + b) * kLittleSteps + l;
}

std::vector<ProcessorConfig> enumerate_configs() {
  std::vector<ProcessorConfig> out;
  out.reserve(kConfigCount);
  for (Core core : {Core::kBig, Core::kLittle}) {
    for (int b = kMinMhz; b <= kBigMaxMhz; b += kStepMhz) {
      for (int l = kMinMhz; l <= kLittleMaxMhz; l += kStepMhz) out.push_back({core, b, l});
    }
  }
  return out;
}

std::string to_string(const ProcessorConfig& config) {
  return std::string(to_string(config.render_core)) + "," + ghz_text(config.big_mhz) + "," +
         ghz_text(config.little_mhz);
}

ProcessorConfig parse_config(std::string_view text) {
  auto first = text.find(',');
  auto second = first == std::string_view::npos ? first : text.find(',', first + 1);
  if (second == std::string_view::npos) {
    throw ValidationError("configuration must look like big,1.9,1.4: '" + std::string(text) + "'");
  }
  ProcessorConfig config;
  auto core = text.substr(0, first);
  if (core == "big") config.render_core = Core::kBig;
  else if (core == "little") config.render_core = Core::kLittle;
  else throw ValidationError("unknown core '" + std::string(core) + "'");
  config.big_mhz = parse_ghz(text.substr(first + 1, second - first - 1));
  config.little_mhz = parse_ghz(text.substr(second + 1));
  require_on_grid(config);
  return config;
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kLoadTime: return "time";
    case Metric::kEnergy: return "energy";
    case Metric::kEdp: return "edp";
  }
  return "time";
}

Metric parse_metric(std::string_view text) {
  if (text == "time" || text == "load_time") return Metric::kLoadTime;
  if (text == "energy") return Metric::kEnergy;
  if (text == "edp") return Metric::kEdp;
  throw ValidationError("unknown metric '" + std::string(text) + "'");
}

}  // namespace webcfg::device
