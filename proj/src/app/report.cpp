#include "webcfg/app/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "webcfg/error.hpp"

namespace webcfg::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

}  // namespace

OverheadProfile profile_overheads(const CorpusManifest& manifest,
                                  std::shared_ptr<const learn::MulticlassSvmModel> model,
                                  const device::CostModelParams& params, std::size_t chunk_size,
                                  std::size_t max_pages) {
  OverheadProfile profile;
  std::vector<std::size_t> picks;
  std::size_t largest = 0;
  for (std::size_t i = 0; i < manifest.pages.size(); ++i) {
    if (i < max_pages) picks.push_back(i);
    if (manifest.pages[i].bytes > manifest.pages[largest].bytes) largest = i;
  }
  if (!manifest.pages.empty() && std::find(picks.begin(), picks.end(), largest) == picks.end()) {
    picks.push_back(largest);
  }
  std::map<std::string, double> sums;
  for (std::size_t i : picks) {
    const auto& entry = manifest.pages[i];
    const auto source = webparse::load_page_source(manifest.page_dir(entry));
    const auto trace = sched::run_session(source, entry.id, model, params, chunk_size);
    std::map<std::string, double> per_phase;
    for (const auto& e : trace.overhead_log) per_phase[std::string(sched::to_string(e.phase))] += e.ms;
    double decision = 0.0;
    for (const auto& [phase, ms] : per_phase) {
      sums[phase] += ms;
      profile.max_ms[phase] = std::max(profile.max_ms[phase], ms);
      if (phase != "migration") decision += ms;
    }
    profile.max_decision_ms = std::max(profile.max_decision_ms, decision);
    if (i == largest) {
      profile.largest_page = entry.id;
      profile.largest_page_kb = static_cast<double>(source.total_bytes()) / 1024.0;
      profile.largest_page_decision_ms = decision;
    }
    ++profile.sessions;
  }
  for (const auto& [phase, total] : sums) profile.mean_ms[phase] = total / static_cast<double>(profile.sessions);
  return profile;
}

ordered_json to_json(const OverheadProfile& p) {
  return {{"sessions", p.sessions},
          {"mean_ms", p.mean_ms},
          {"max_ms", p.max_ms},
          {"max_decision_ms", p.max_decision_ms},
          {"budget_ms", sched::OverheadBudget::kDecisionMs},
          {"largest_page", p.largest_page},
          {"largest_page_kb", p.largest_page_kb},
          {"largest_page_decision_ms", p.largest_page_decision_ms}};
}

OverheadProfile overhead_profile_from_json(const ordered_json& doc) {
  try {
    OverheadProfile p;
    p.sessions = doc.at("sessions").get<std::size_t>();
    p.mean_ms = doc.at("mean_ms").get<std::map<std::string, double>>();
    p.max_ms = doc.at("max_ms").get<std::map<std::string, double>>();
    p.max_decision_ms = doc.at("max_decision_ms").get<double>();
    p.largest_page = doc.at("largest_page").get<std::string>();
    p.largest_page_kb = doc.at("largest_page_kb").get<double>();
    p.largest_page_decision_ms = doc.at("largest_page_decision_ms").get<double>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed timing file: ") + e.what());
  }
}

std::string describe_improvement(device::Metric metric, double ratio) {
  if (metric == device::Metric::kLoadTime) return format("%.3fx speedup", 1.0 / ratio);
  return format("%.1f%% reduction", 100.0 * (1.0 - ratio));
}

std::string write_report(std::span<const EvaluationReport> reports, const OverheadProfile* overheads,
                         const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());

  std::string summary;
  std::string improvement = "# metric geomean_vs_hmp min_vs_hmp max_vs_hmp oracle_vs_hmp\n";
  for (const auto& r : reports) {
    const auto metric = std::string(device::to_string(r.metric));
    const auto& a = r.aggregates;
    summary += "== " + metric + " (" + std::string(to_string(r.mode)) + ", " +
               std::to_string(r.rows.size()) + " pages)\n";
    summary += "  predicted vs HMP:   " + format("%.4f", a.predicted_vs_hmp) + "  (" +
               describe_improvement(r.metric, a.predicted_vs_hmp) + ")\n";
    summary += "  range over pages:   " + format("%.4f .. %.4f", a.min_ratio, a.max_ratio) + "\n";
    summary += "  oracle vs HMP:      " + format("%.4f", a.oracle_vs_hmp) + "  (" +
               describe_improvement(r.metric, a.oracle_vs_hmp) + ")\n";
    summary += "  oracle fraction:    " + format("%.4f", a.oracle_fraction) + "\n";
    summary += "  label accuracy:     " + format("%.4f", a.accuracy) + "\n";
    summary += "  repetitions:        " +
               format("%zu total, %zu max, %.1f%% within CI target", a.repetitions_total,
                      a.repetitions_max, 100.0 * a.ci_met_fraction) +
               "\n";
    summary += "  labels (" + std::to_string(r.labels.size()) + "):";
    for (const auto& c : r.labels.configs) summary += " " + device::to_string(c);
    summary += "\n";
    if (!r.sweep.empty()) {
      const auto best = std::min_element(r.sweep.begin(), r.sweep.end(), [](const auto& x, const auto& y) {
        return x.geomean_ratio < y.geomean_ratio;
      });
      summary += "  best fixed config:  " + device::to_string(best->config) +
                 format(" at %.4f vs HMP", best->geomean_ratio) + "\n";
    }
    std::vector<const ImportanceEntry*> ranked;
    for (const auto& e : r.importance) ranked.push_back(&e);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](auto* x, auto* y) { return x->gain_ratio > y->gain_ratio; });
    summary += "  top features:";
    for (std::size_t i = 0; i < std::min<std::size_t>(5, ranked.size()); ++i) {
      summary += " " + ranked[i]->feature + format("(%.3f)", ranked[i]->gain_ratio);
    }
    summary += "\n\n";

    improvement += format("%s %.10g %.10g %.10g %.10g\n", metric.c_str(), a.predicted_vs_hmp, a.min_ratio,
                          a.max_ratio, a.oracle_vs_hmp);

    std::string sweep = "# config geomean_vs_hmp\n";
    for (const auto& s : r.sweep) sweep += format("%s %.10g\n", device::to_string(s.config).c_str(), s.geomean_ratio);
    sweep += format("predictor %.10g\n", a.predicted_vs_hmp);
    write_text(out / ("sweep_" + metric + ".dat"), sweep);

    std::string hist = "# config oracle_count predicted_count\n";
    for (const auto& h : r.histogram) {
      hist += format("%s %zu %zu\n", device::to_string(h.config).c_str(), h.oracle_count, h.predicted_count);
    }
    write_text(out / ("histogram_" + metric + ".dat"), hist);

    std::string imp = "# rank feature gain_ratio\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      imp += format("%zu %s %.10g\n", i + 1, ranked[i]->feature.c_str(), ranked[i]->gain_ratio);
    }
    write_text(out / ("importance_" + metric + ".dat"), imp);
  }
  write_text(out / "improvement.dat", improvement);

  if (overheads) {
    std::string dat = "# phase mean_ms max_ms\n";
    summary += "== runtime overhead (" + std::to_string(overheads->sessions) + " sessions)\n";
    for (const auto& [phase, mean] : overheads->mean_ms) {
      const double mx = overheads->max_ms.count(phase) ? overheads->max_ms.at(phase) : mean;
      dat += format("%s %.6f %.6f\n", phase.c_str(), mean, mx);
      summary += format("  %-20s mean %8.3f ms  max %8.3f ms\n", phase.c_str(), mean, mx);
    }
    summary += format("  decision path worst %.3f ms (budget %.0f ms); largest page %s (%.0f KB): %.3f ms\n",
                      overheads->max_decision_ms, sched::OverheadBudget::kDecisionMs,
                      overheads->largest_page.c_str(), overheads->largest_page_kb,
                      overheads->largest_page_decision_ms);
    write_text(out / "overheads.dat", dat);
  }
  write_text(out / "summary.txt", summary);
  return summary;
}

}  // namespace webcfg::app
