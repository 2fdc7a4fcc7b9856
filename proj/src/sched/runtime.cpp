#include "webcfg/sched/runtime.hpp"

#include <chrono>
#include <cmath>

#include "webcfg/error.hpp"
#include "webcfg/features/extract.hpp"

namespace webcfg::sched {

using nlohmann::ordered_json;

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kFeatureExtraction: return "feature_extraction";
    case Phase::kPrediction: return "prediction";
    case Phase::kFrequencySetting: return "frequency_setting";
    case Phase::kMigration: return "migration";
  }
  return "prediction";
}

NetworkClass NetworkClass::from_packet_loss(Technology technology, double loss_fraction) {
  return {technology, loss_fraction > 0.30 ? LinkQuality::kPoor : LinkQuality::kGood};
}

namespace {

constexpr std::string_view kTechNames[] = {"2g", "3g", "4g", "wifi"};

}  // namespace

std::string to_string(const NetworkClass& network) {
  std::string out = network.quality == LinkQuality::kPoor ? "poor-" : "good-";
  out += kTechNames[static_cast<int>(network.technology)];
  return out;
}

NetworkClass parse_network(std::string_view text) {
  for (const auto& n : all_network_classes()) {
    if (to_string(n) == text) return n;
  }
  throw ValidationError("unknown network class '" + std::string(text) +
                        "' (expected e.g. good-3g, poor-wifi)");
}

std::vector<NetworkClass> all_network_classes() {
  std::vector<NetworkClass> out;
  for (auto tech : {Technology::k2G, Technology::k3G, Technology::k4G, Technology::kWifi}) {
    for (auto quality : {LinkQuality::kPoor, LinkQuality::kGood}) out.push_back({tech, quality});
  }
  return out;
}

device::Metric recommend_goal(const NetworkClass& network) {
  const bool poor = network.quality == LinkQuality::kPoor;
  switch (network.technology) {
    case Technology::k2G: return device::Metric::kEnergy;
    case Technology::k3G: return poor ? device::Metric::kEnergy : device::Metric::kEdp;
    case Technology::k4G:
    case Technology::kWifi: return poor ? device::Metric::kEdp : device::Metric::kLoadTime;
  }
  return device::Metric::kEdp;
}

bool should_repredict(std::size_t n_old, std::size_t n_new) {
  if (n_old == 0) return n_new > 0;
  const auto diff = n_new > n_old ? n_new - n_old : n_old - n_new;
  // diff / n_old > 0.3, in integers
  return diff * 10 > n_old * 3;
}

Clock steady_clock_ms() {
  return [] {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
  };
}

RuntimeSession::RuntimeSession(std::shared_ptr<const learn::MulticlassSvmModel> model,
                               device::ProcessorConfig initial, Clock clock)
    : model_(std::move(model)), current_(initial), clock_(std::move(clock)) {
  if (!model_) throw ValidationError("runtime session needs a model");
  device::require_on_grid(current_);
}

device::ProcessorConfig RuntimeSession::predict(const webparse::DomSnapshot& snapshot) {
  const double t0 = clock_();
  const auto raw = features::project(
      features::extract_raw_features(snapshot.tree, snapshot.styles, snapshot.bytes_consumed));
  const double t1 = clock_();
  const auto config = learn::predict_label(*model_, raw);
  const double t2 = clock_();
  log_.push_back({Phase::kFeatureExtraction, t1 - t0});
  log_.push_back({Phase::kPrediction, t2 - t1});
  last_nodes_ = snapshot.tree.node_count();
  ++predictions_;
  predicted_ = true;
  return config;
}

device::ProcessorConfig RuntimeSession::initial_predict(const webparse::DomSnapshot& snapshot) {
  return predict(snapshot);
}

RuntimeSession::Reprediction RuntimeSession::maybe_repredict(const webparse::DomSnapshot& snapshot) {
  if (!predicted_) throw ValidationError("re-prediction requested before the initial prediction");
  Reprediction out;
  out.config = current_;
  if (!should_repredict(last_nodes_, snapshot.tree.node_count())) return out;
  out.fired = true;
  ++repredictions_;
  out.config = predict(snapshot);
  out.changed = !(out.config == current_);
  return out;
}

double RuntimeSession::apply_config(const device::ProcessorConfig& config) {
  device::require_on_grid(config);
  double charged = 0.0;
  if (config.render_core != current_.render_core) {
    log_.push_back({Phase::kMigration, OverheadBudget::kMigrationMs});
    charged += OverheadBudget::kMigrationMs;
  }
  const int changed = (config.big_mhz != current_.big_mhz) + (config.little_mhz != current_.little_mhz);
  if (changed > 0) {
    const double ms = changed * OverheadBudget::kFrequencyChangeMs;
    log_.push_back({Phase::kFrequencySetting, ms});
    charged += ms;
  }
  current_ = config;
  return charged;
}

double RuntimeSession::total_overhead_ms() const {
  double total = 0.0;
  for (const auto& e : log_) total += e.ms;
  return total;
}

double RuntimeSession::phase_overhead_ms(Phase phase) const {
  double total = 0.0;
  for (const auto& e : log_) {
    if (e.phase == phase) total += e.ms;
  }
  return total;
}

std::string SessionTrace::json_lines() const {
  std::string out;
  for (const auto& e : events) {
    out += e.dump();
    out += '\n';
  }
  return out;
}

SessionTrace run_session(const webparse::PageSource& page, std::string_view page_id,
                         std::shared_ptr<const learn::MulticlassSvmModel> model,
                         const device::CostModelParams& params, std::size_t chunk_size, Clock clock) {
  webparse::PageStream stream(page, chunk_size);
  RuntimeSession session(std::move(model), device::ProcessorConfig{}, std::move(clock));
  SessionTrace trace;
  std::size_t logged = 0;
  auto log_overheads = [&] {
    const auto& log = session.overhead_log();
    for (; logged < log.size(); ++logged) {
      const auto& e = log[logged];
      if (e.phase == Phase::kMigration) {
        trace.events.push_back({{"event", "migration"}, {"ms", e.ms}});
      } else {
        trace.events.push_back({{"event", "overhead"}, {"phase", to_string(e.phase)}, {"ms", e.ms}});
      }
    }
  };
  auto record_prediction = [&](std::string_view kind, const device::ProcessorConfig& config,
                               bool changed) {
    trace.events.push_back({{"event", "prediction"},
                            {"kind", kind},
                            {"config", device::to_string(config)},
                            {"changed", changed},
                            {"nodes", session.last_predicted_node_count()}});
  };

  while (stream.advance()) {
    const auto snap = stream.snapshot();
    trace.events.push_back({{"event", "snapshot"},
                            {"index", trace.snapshots},
                            {"bytes", snap.bytes_consumed},
                            {"nodes", snap.tree.node_count()},
                            {"rules", snap.styles.size()}});
    if (trace.snapshots++ == 0) {
      const auto config = session.initial_predict(snap);
      record_prediction("initial", config, !(config == session.current_config()));
      session.apply_config(config);
    } else {
      const auto r = session.maybe_repredict(snap);
      if (r.fired) {
        record_prediction("reprediction", r.config, r.changed);
        if (r.changed) session.apply_config(r.config);
      }
    }
    log_overheads();
  }

  const auto final_raw = features::project(
      features::extract_raw_features(stream.tree(), stream.styles(), stream.bytes_consumed()));
  trace.final_config = session.current_config();
  trace.device_cost =
      device::evaluate(final_raw, trace.final_config, params, {device::page_key(page_id), 0});
  trace.overhead_ms = session.total_overhead_ms();
  trace.load_time = trace.device_cost.load_time + trace.overhead_ms / 1000.0;
  trace.predictions = session.prediction_count();
  trace.repredictions = session.reprediction_count();
  trace.overhead_log = session.overhead_log();
  trace.events.push_back({{"event", "final"},
                          {"config", device::to_string(trace.final_config)},
                          {"device_load_time_s", trace.device_cost.load_time},
                          {"overhead_ms", trace.overhead_ms},
                          {"load_time_s", trace.load_time},
                          {"energy_j", trace.device_cost.energy},
                          {"edp_js", trace.device_cost.energy * trace.load_time},
                          {"predictions", trace.predictions},
                          {"repredictions", trace.repredictions}});
  return trace;
}

}  // namespace webcfg::sched
