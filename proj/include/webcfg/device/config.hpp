#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace webcfg::device {

enum class Core { kBig, kLittle };

std::string_view to_string(Core core);

/// Frequency grid, in MHz: big 400..2000, little 400..1400, 100 MHz steps.
inline constexpr int kStepMhz = 100;
inline constexpr int kMinMhz = 400;
inline constexpr int kBigMaxMhz = 2000;
inline constexpr int kLittleMaxMhz = 1400;
inline constexpr std::size_t kBigSteps = (kBigMaxMhz - kMinMhz) / kStepMhz + 1;        // 17
inline constexpr std::size_t kLittleSteps = (kLittleMaxMhz - kMinMhz) / kStepMhz + 1;  // 11
inline constexpr std::size_t kConfigCount = 2 * kBigSteps * kLittleSteps;              // 374

/// Which core runs the rendering process, and the clock of each cluster.
struct ProcessorConfig {
  Core render_core = Core::kBig;
  int big_mhz = kBigMaxMhz;
  int little_mhz = kLittleMaxMhz;

  double big_ghz() const { return big_mhz / 1000.0; }
  double little_ghz() const { return little_mhz / 1000.0; }
  int render_mhz() const { return render_core == Core::kBig ? big_mhz : little_mhz; }

  auto operator<=>(const ProcessorConfig&) const = default;
};

bool on_grid(const ProcessorConfig& config);
/// Throws ValidationError for off-grid frequencies.
void require_on_grid(const ProcessorConfig& config);

/// Position in enumerate_configs(): big before little, then f_big, then
/// f_little, all ascending.
std::size_t config_index(const ProcessorConfig& config);
std::vector<ProcessorConfig> enumerate_configs();

/// "big,1.9,1.4" style text; parse_config accepts the same form.
std::string to_string(const ProcessorConfig& config);
ProcessorConfig parse_config(std::string_view text);

enum class Metric { kLoadTime, kEnergy, kEdp };

inline constexpr Metric kAllMetrics[] = {Metric::kLoadTime, Metric::kEnergy, Metric::kEdp};

/// "time", "energy", "edp".
std::string_view to_string(Metric metric);
/// Accepts "time", "load_time", "energy", "edp".
Metric parse_metric(std::string_view text);

}  // namespace webcfg::device
