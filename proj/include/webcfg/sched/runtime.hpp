#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "webcfg/device/cost_model.hpp"
#include "webcfg/learn/multiclass.hpp"
#include "webcfg/webparse/snapshot.hpp"

namespace webcfg::sched {

enum class Phase { kFeatureExtraction, kPrediction, kFrequencySetting, kMigration };

std::string_view to_string(Phase phase);

struct OverheadBudget {
  /// Feature extraction + prediction + frequency setting.
  static constexpr double kDecisionMs = 20.0;
  static constexpr double kMigrationMs = 15.0;
  static constexpr double kFrequencyChangeMs = 1.0;  // per core whose clock changes
};

struct OverheadEntry {
  Phase phase;
  double ms = 0.0;
};

enum class Technology { k2G, k3G, k4G, kWifi };
enum class LinkQuality { kPoor, kGood };

struct NetworkClass {
  Technology technology = Technology::kWifi;
  LinkQuality quality = LinkQuality::kGood;

  /// Poor iff packet loss is above 30%.
  static NetworkClass from_packet_loss(Technology technology, double loss_fraction);
  bool operator==(const NetworkClass&) const = default;
};

std::string to_string(const NetworkClass& network);
/// "good-3g", "poor-wifi", ...
NetworkClass parse_network(std::string_view text);
std::vector<NetworkClass> all_network_classes();

/// Slow links favor energy, mid-range links EDP, fast links load time.
device::Metric recommend_goal(const NetworkClass& network);

/// True iff |n_new - n_old| / n_old > 0.30. With n_old = 0 any growth counts.
bool should_repredict(std::size_t n_old, std::size_t n_new);

/// Monotonic time in milliseconds.
using Clock = std::function<double()>;
Clock steady_clock_ms();

/// Runtime state of one page load. Not thread-safe; the model may be
/// shared between sessions.
class RuntimeSession {
 public:
  explicit RuntimeSession(std::shared_ptr<const learn::MulticlassSvmModel> model,
                          device::ProcessorConfig initial = {}, Clock clock = steady_clock_ms());

  /// Extracts features from the snapshot, predicts and records the node
  /// count. Logs measured extraction and prediction time.
  device::ProcessorConfig initial_predict(const webparse::DomSnapshot& snapshot);

  struct Reprediction {
    bool fired = false;
    bool changed = false;  // predicted config differs from the current one
    device::ProcessorConfig config;
  };
  /// Re-predicts when the node count moved by more than 30% since the last
  /// prediction. Throws ValidationError before initial_predict().
  Reprediction maybe_repredict(const webparse::DomSnapshot& snapshot);

  /// Switches to `config` and returns the charged overhead: 15 ms if the
  /// render core changes plus 1 ms per cluster whose clock changes.
  double apply_config(const device::ProcessorConfig& config);

  const learn::MulticlassSvmModel& model() const { return *model_; }
  const device::ProcessorConfig& current_config() const { return current_; }
  std::size_t last_predicted_node_count() const { return last_nodes_; }
  std::size_t reprediction_count() const { return repredictions_; }
  std::size_t prediction_count() const { return predictions_; }
  const std::vector<OverheadEntry>& overhead_log() const { return log_; }
  double total_overhead_ms() const;
  double phase_overhead_ms(Phase phase) const;

 private:
  device::ProcessorConfig predict(const webparse::DomSnapshot& snapshot);

  std::shared_ptr<const learn::MulticlassSvmModel> model_;
  device::ProcessorConfig current_;
  Clock clock_;
  std::size_t last_nodes_ = 0;
  std::size_t repredictions_ = 0;
  std::size_t predictions_ = 0;
  bool predicted_ = false;
  std::vector<OverheadEntry> log_;
};

struct SessionTrace {
  std::vector<nlohmann::ordered_json> events;
  device::ProcessorConfig final_config;
  device::WorkloadCost device_cost;  // cost of the final config, no overheads
  double overhead_ms = 0.0;
  double load_time = 0.0;            // device load time + overhead_ms / 1000
  std::size_t snapshots = 0;
  std::size_t predictions = 0;
  std::size_t repredictions = 0;
  std::vector<OverheadEntry> overhead_log;

  /// One JSON object per line.
  std::string json_lines() const;
};

/// Streams the page in `chunk_size` chunks, predicts on the first snapshot,
/// checks for re-prediction on each later one, and charges the final
/// config's cost plus overheads. Throws ValidationError on chunk_size 0.
SessionTrace run_session(const webparse::PageSource& page, std::string_view page_id,
                         std::shared_ptr<const learn::MulticlassSvmModel> model,
                         const device::CostModelParams& params, std::size_t chunk_size,
                         Clock clock = steady_clock_ms());

}  // namespace webcfg::sched
