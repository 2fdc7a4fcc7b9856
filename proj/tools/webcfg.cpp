#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "webcfg/app/corpus.hpp"
#include "webcfg/app/evaluation.hpp"
#include "webcfg/app/generator.hpp"
#include "webcfg/app/report.hpp"
#include "webcfg/error.hpp"
#include "webcfg/features/extract.hpp"
#include "webcfg/learn/model_io.hpp"
#include "webcfg/sched/runtime.hpp"

namespace fs = std::filesystem;
using namespace webcfg;
using nlohmann::ordered_json;

namespace {

struct Globals {
  std::uint64_t seed = 7;
  bool seed_set = false;
  std::string params;
  std::string metric = "all";
  std::string out = ".";
  std::optional<double> noise_sigma;
};

std::vector<device::Metric> metrics_of(const std::string& text) {
  if (text == "all") return {std::begin(device::kAllMetrics), std::end(device::kAllMetrics)};
  return {device::parse_metric(text)};
}

device::CostModelParams load_params(const Globals& g) {
  device::CostModelParams params;
  if (!g.params.empty()) {
    ordered_json doc;
    try {
      if (g.params.front() == '{') {
        doc = ordered_json::parse(g.params);
      } else {
        std::ifstream in(g.params);
        if (!in) throw ValidationError("cannot read params file " + g.params);
        doc = ordered_json::parse(in);
      }
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(std::string("params are not valid JSON: ") + e.what());
    }
    params = device::params_from_json(doc);
  }
  if (g.seed_set) params.seed = g.seed;
  if (g.noise_sigma) params.noise_sigma = *g.noise_sigma;
  params.validate();
  return params;
}

fs::path out_dir(const Globals& g) {
  fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

bool is_page_dir(const fs::path& p) { return fs::is_regular_file(p / "index.html"); }

std::string features_csv(const std::vector<learn::PageFeatures>& pages) {
  const auto& schema = features::FeatureSchema::standard();
  std::string out = "page_id";
  for (const auto& d : schema.descriptors()) {
    out += ',';
    out += d.name;
  }
  out += '\n';
  char buf[64];
  for (const auto& p : pages) {
    out += p.id;
    for (double v : p.raw.values) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

ordered_json feature_json(const features::FeatureVector& v) {
  ordered_json doc;
  doc["schema_version"] = v.schema_version;
  const auto& schema = features::FeatureSchema::standard();
  auto& values = doc["features"];
  for (std::size_t i = 0; i < features::kFeatureCount; ++i) values[std::string(schema[i].name)] = v[i];
  return doc;
}

int cmd_gen_corpus(const Globals& g, std::size_t n, const app::SizeProfile& profile) {
  const auto manifest = app::gen_corpus(g.out, n, g.seed, profile);
  std::size_t bytes = 0;
  for (const auto& p : manifest.pages) bytes += p.bytes;
  std::cout << "wrote " << manifest.pages.size() << " pages (" << bytes / 1024 << " KB) to " << g.out
            << " with seed " << g.seed << "\n";
  return 0;
}

int cmd_extract(const Globals& g, const std::string& input) {
  if (is_page_dir(input)) {
    const auto page = webparse::parse_page(webparse::load_page_source(input));
    const auto doc = feature_json(features::extract_features(page));
    std::cout << doc.dump(1) << "\n";
    if (g.out != ".") write_file(out_dir(g) / "features.json", doc.dump(1) + "\n");
    return 0;
  }
  const auto manifest = app::load_corpus(input);
  const auto pages = app::extract_corpus(manifest);
  const auto path = out_dir(g) / "features.csv";
  write_file(path, features_csv(pages));
  std::cout << "extracted " << pages.size() << " feature vectors to " << path.string() << "\n";
  return 0;
}

int cmd_train(const Globals& g, const std::string& corpus_dir) {
  const auto params = load_params(g);
  const auto manifest = app::load_corpus(corpus_dir);
  const auto pages = app::extract_corpus(manifest);
  const auto dir = out_dir(g);
  for (auto metric : metrics_of(g.metric)) {
    learn::GridChoice choice;
    const auto model = learn::train_model(pages, metric, params.without_noise(), learn::HyperGrid{}, &choice);
    const auto name = std::string(device::to_string(metric));
    const auto path = dir / ("model_" + name + ".json");
    learn::save_model(model, path);
    std::cout << name << ": " << model.label_set.size() << " labels, " << model.machines.size()
              << " machines, C=" << choice.C << " gamma=" << choice.gamma
              << " cv-accuracy=" << choice.accuracy << " -> " << path.string() << "\n";
    for (std::size_t i = 0; i < model.label_set.size(); ++i) {
      std::cout << "  " << i << "  " << device::to_string(model.label_set.configs[i]) << "\n";
    }
    if (model.constant_label) {
      std::cerr << "warning: " << name << " training data has a single optimum; the model always predicts "
                << device::to_string(model.label_set.configs[*model.constant_label]) << "\n";
    }
  }
  return 0;
}

int cmd_evaluate(const Globals& g, const std::string& corpus_dir, const std::string& mode,
                 std::size_t profile_pages, std::size_t chunk_size) {
  const auto params = load_params(g);
  const auto manifest = app::load_corpus(corpus_dir);
  const auto pages = app::extract_corpus(manifest);
  const auto metrics = metrics_of(g.metric);
  app::EvaluationOptions options;
  options.mode = app::parse_mode(mode);
  const auto reports = app::evaluate(pages, metrics, params, options);
  const auto dir = out_dir(g);
  for (const auto& r : reports) {
    const auto name = std::string(device::to_string(r.metric));
    write_file(dir / ("evaluation_" + name + ".json"), app::to_json(r).dump(1) + "\n");
    write_file(dir / ("rows_" + name + ".csv"), app::rows_csv(r));
    const auto& a = r.aggregates;
    std::printf("%-6s accuracy %.4f  vs HMP %.4f (%s)  oracle fraction %.4f  reps max %zu  CI met %.1f%%\n",
                name.c_str(), a.accuracy, a.predicted_vs_hmp,
                app::describe_improvement(r.metric, a.predicted_vs_hmp).c_str(), a.oracle_fraction,
                a.repetitions_max, 100.0 * a.ci_met_fraction);
  }
  if (profile_pages > 0) {
    auto model = std::make_shared<const learn::MulticlassSvmModel>(
        learn::train_model(pages, metrics.front(), params.without_noise(), learn::HyperGrid{}));
    const auto profile = app::profile_overheads(manifest, model, params, chunk_size, profile_pages);
    write_file(dir / "timing.json", app::to_json(profile).dump(1) + "\n");
    std::printf("decision path worst %.3f ms over %zu sessions (budget %.0f ms)\n", profile.max_decision_ms,
                profile.sessions, sched::OverheadBudget::kDecisionMs);
  }
  return 0;
}

int cmd_predict(const Globals& g, const std::string& page_dir, std::string model_path,
                const std::string& model_dir, std::string goal, const std::string& network,
                std::size_t chunk_size) {
  const auto params = load_params(g);
  if (!network.empty()) {
    const auto net = sched::parse_network(network);
    goal = std::string(device::to_string(sched::recommend_goal(net)));
    std::cout << "network " << sched::to_string(net) << " -> goal " << goal << "\n";
  }
  if (model_path.empty()) {
    if (goal.empty()) goal = g.metric == "all" ? "edp" : g.metric;
    model_path = (fs::path(model_dir) / ("model_" + std::string(device::to_string(device::parse_metric(goal))) +
                                         ".json"))
                     .string();
  }
  if (!fs::is_regular_file(model_path)) throw ValidationError("no model file at " + model_path);
  auto model = std::make_shared<const learn::MulticlassSvmModel>(learn::load_model(model_path));
  const auto source = webparse::load_page_source(page_dir);
  const auto id = fs::path(page_dir).filename().string();
  const auto trace = sched::run_session(source, id, model, params, chunk_size);
  std::cout << "config " << device::to_string(trace.final_config) << "\n";
  std::cout << "snapshots " << trace.snapshots << ", predictions " << trace.predictions << ", re-predictions "
            << trace.repredictions << "\n";
  for (const auto& e : trace.overhead_log) {
    std::printf("  %-20s %8.3f ms\n", std::string(sched::to_string(e.phase)).c_str(), e.ms);
  }
  std::printf("load time %.6f s (device %.6f s + overhead %.3f ms), energy %.6f J\n", trace.load_time,
              trace.device_cost.load_time, trace.overhead_ms, trace.device_cost.energy);
  if (g.out != ".") write_file(out_dir(g) / "trace.jsonl", trace.json_lines());
  return 0;
}

int cmd_sweep(const Globals& g, const std::string& corpus_dir, bool all_configs) {
  const auto params = load_params(g).without_noise();
  const auto manifest = app::load_corpus(corpus_dir);
  const auto pages = app::extract_corpus(manifest);
  std::vector<features::FeatureVector> raws;
  for (const auto& p : pages) raws.push_back(p.raw);
  const auto dir = out_dir(g);
  for (auto metric : metrics_of(g.metric)) {
    std::vector<device::ProcessorConfig> configs;
    if (all_configs) {
      configs = device::enumerate_configs();
    } else {
      learn::LabelSet labels;
      for (const auto& raw : raws) labels.intern(device::oracle_best(raw, metric, params).config);
      configs = labels.configs;
    }
    const auto scores = device::fixed_config_sweep(raws, configs, metric, params);
    const auto name = std::string(device::to_string(metric));
    std::string csv = "config,geomean_vs_hmp\n";
    char buf[128];
    for (const auto& s : scores) {
      std::snprintf(buf, sizeof buf, "\"%s\",%.17g\n", device::to_string(s.config).c_str(), s.geomean_ratio);
      csv += buf;
    }
    write_file(dir / ("sweep_" + name + ".csv"), csv);
    const auto best = std::min_element(scores.begin(), scores.end(),
                                       [](const auto& a, const auto& b) { return a.geomean_ratio < b.geomean_ratio; });
    std::printf("%-6s %zu configs, best fixed %s at %.4f vs HMP\n", name.c_str(), scores.size(),
                device::to_string(best->config).c_str(), best->geomean_ratio);
  }
  return 0;
}

ordered_json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + " is not valid JSON: " + e.what());
  }
}

int cmd_report(const Globals& g, const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  std::optional<fs::path> timing;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        const auto name = e.path().filename().string();
        if (name.starts_with("evaluation_") && e.path().extension() == ".json") found.push_back(e.path());
        if (name == "timing.json") timing = e.path();
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.emplace_back(in);
    }
  }
  if (files.empty()) throw ValidationError("no evaluation reports found");
  std::vector<app::EvaluationReport> reports;
  for (const auto& f : files) reports.push_back(app::report_from_json(read_json(f)));
  std::optional<app::OverheadProfile> profile;
  if (timing) profile = app::overhead_profile_from_json(read_json(*timing));
  std::cout << app::write_report(reports, profile ? &*profile : nullptr, out_dir(g));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predicts per-page big.LITTLE processor configurations from web page features."};
  app.require_subcommand(1);
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Corpus / noise seed")->capture_default_str();
  app.add_option("--params", g.params, "Cost model parameters: a JSON file or inline JSON object");
  app.add_option("--metric", g.metric, "Optimization goal")
      ->check(CLI::IsMember({"time", "energy", "edp", "all"}))
      ->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--noise-sigma", g.noise_sigma, "Override the measurement noise level");

  std::size_t n = 400;
  app::SizeProfile profile;
  auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic page corpus into --out");
  gen->add_option("-n,--pages", n, "Number of pages")->capture_default_str();
  gen->add_option("--min-nodes", profile.min_nodes)->capture_default_str();
  gen->add_option("--max-nodes", profile.max_nodes)->capture_default_str();
  gen->add_option("--min-kb", profile.min_kb)->capture_default_str();
  gen->add_option("--max-kb", profile.max_kb)->capture_default_str();

  std::string input;
  auto* extract = app.add_subcommand("extract", "Extract raw features from a page or a corpus");
  extract->add_option("input", input, "Page directory or corpus directory")->required()->check(CLI::ExistingDirectory);

  std::string corpus;
  auto* train = app.add_subcommand("train", "Label the corpus and train one model per metric");
  train->add_option("corpus", corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);

  std::string mode = "loocv";
  std::size_t profile_pages = 20;
  std::size_t chunk_size = 16384;
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate against the oracle and the HMP baseline");
  evaluate->add_option("corpus", corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--mode", mode)->check(CLI::IsMember({"loocv", "holdout"}))->capture_default_str();
  evaluate->add_option("--profile-pages", profile_pages, "Pages to time the runtime path on (0 disables)")
      ->capture_default_str();
  evaluate->add_option("--chunk-size", chunk_size, "Bytes per parser chunk when profiling")->capture_default_str();

  std::string page_dir;
  std::string model_path;
  std::string model_dir = ".";
  std::string goal;
  std::string network;
  auto* predict = app.add_subcommand("predict", "Run a simulated page load with runtime prediction");
  predict->add_option("page", page_dir, "Page directory")->required()->check(CLI::ExistingDirectory);
  predict->add_option("--model", model_path, "Model file")->check(CLI::ExistingFile);
  predict->add_option("--model-dir", model_dir, "Directory holding model_<goal>.json files")->capture_default_str();
  auto* goal_opt = predict->add_option("--goal", goal)->check(CLI::IsMember({"time", "energy", "edp"}));
  predict->add_option("--network", network, "Network class such as good-3g or poor-wifi; picks the goal")
      ->excludes(goal_opt);
  predict->add_option("--chunk-size", chunk_size, "Bytes per parser chunk")->capture_default_str();

  bool all_configs = false;
  auto* sweep = app.add_subcommand("sweep", "Score fixed configurations against HMP");
  sweep->add_option("corpus", corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  sweep->add_flag("--all-configs", all_configs, "Sweep all 374 configurations instead of the label set");

  std::vector<std::string> report_inputs;
  auto* report = app.add_subcommand("report", "Summarize evaluation reports into text and plot data");
  report->add_option("reports", report_inputs, "Evaluation JSON files or directories")->required();

  for (auto* sub : {gen, extract, train, evaluate, predict, sweep, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    if (*gen) return cmd_gen_corpus(g, n, profile);
    if (*extract) return cmd_extract(g, input);
    if (*train) return cmd_train(g, corpus);
    if (*evaluate) return cmd_evaluate(g, corpus, mode, profile_pages, chunk_size);
    if (*predict) return cmd_predict(g, page_dir, model_path, model_dir, goal, network, chunk_size);
    if (*sweep) return cmd_sweep(g, corpus, all_configs);
    if (*report) return cmd_report(g, report_inputs);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
