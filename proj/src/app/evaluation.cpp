#include "webcfg/app/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "webcfg/error.hpp"
#include "webcfg/features/selection.hpp"
#include "webcfg/stats.hpp"

namespace webcfg::app {

using nlohmann::ordered_json;

double ci_width(std::span<const double> samples, double confidence) {
  const std::size_t n = samples.size();
  if (n < 2) return std::numeric_limits<double>::infinity();
  boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
  return 2.0 * t * sample_stddev(samples) / std::sqrt(static_cast<double>(n));
}

Measurement measure(const features::FeatureVector& raw, const device::ProcessorConfig& config,
                    const device::CostModelParams& params, std::uint64_t page,
                    const MeasurementProtocol& protocol) {
  Measurement m;
  if (params.noise_sigma <= 0.0) {
    m.mean = device::evaluate(raw, config, params, {page, 0});
    return m;
  }
  if (protocol.max_repetitions < 2) throw ValidationError("noisy measurement needs at least 2 repetitions");
  std::vector<double> times;
  std::vector<double> energies;
  for (std::uint32_t r = 0; r < protocol.max_repetitions; ++r) {
    const auto sample = device::evaluate(raw, config, params, {page, r});
    times.push_back(sample.load_time);
    energies.push_back(sample.energy);
    if (times.size() < 2) continue;
    m.ci_ratio = std::max(ci_width(times, protocol.confidence) / arithmetic_mean(times),
                          ci_width(energies, protocol.confidence) / arithmetic_mean(energies));
    if (m.ci_ratio < protocol.max_ci_ratio) break;
  }
  m.repetitions = times.size();
  m.met = m.ci_ratio < protocol.max_ci_ratio;
  m.mean.load_time = arithmetic_mean(times);
  m.mean.energy = arithmetic_mean(energies);
  m.mean.edp = m.mean.energy * m.mean.load_time;
  return m;
}

Aggregates aggregate(device::Metric metric, std::span<const EvaluationRow> rows) {
  if (rows.empty()) throw ValidationError("no evaluation rows to aggregate");
  Aggregates a;
  std::vector<double> pred_ratio;
  std::vector<double> oracle_ratio;
  std::vector<double> fraction;
  std::size_t hits = 0;
  std::size_t met = 0;
  for (const auto& row : rows) {
    const double hmp = row.hmp.mean.value(metric);
    pred_ratio.push_back(row.predicted_cost.mean.value(metric) / hmp);
    oracle_ratio.push_back(row.oracle_cost.mean.value(metric) / hmp);
    fraction.push_back(row.oracle_fraction);
    hits += row.correct ? 1 : 0;
    for (const Measurement* m : {&row.hmp, &row.predicted_cost, &row.oracle_cost}) {
      ++a.measurements;
      a.repetitions_total += m->repetitions;
      a.repetitions_max = std::max(a.repetitions_max, m->repetitions);
      a.max_ci_ratio = std::max(a.max_ci_ratio, m->ci_ratio);
      met += m->met ? 1 : 0;
    }
  }
  a.accuracy = static_cast<double>(hits) / static_cast<double>(rows.size());
  a.predicted_vs_hmp = geometric_mean(pred_ratio);
  a.oracle_vs_hmp = geometric_mean(oracle_ratio);
  a.oracle_fraction = geometric_mean(fraction);
  a.min_ratio = *std::min_element(pred_ratio.begin(), pred_ratio.end());
  a.max_ratio = *std::max_element(pred_ratio.begin(), pred_ratio.end());
  a.ci_met_fraction = static_cast<double>(met) / static_cast<double>(a.measurements);
  return a;
}

std::string_view to_string(EvalMode mode) { return mode == EvalMode::kLoocv ? "loocv" : "holdout"; }

EvalMode parse_mode(std::string_view text) {
  if (text == "loocv") return EvalMode::kLoocv;
  if (text == "holdout") return EvalMode::kHoldout;
  throw ValidationError("unknown evaluation mode '" + std::string(text) + "'");
}

namespace {

struct Prediction {
  device::ProcessorConfig predicted;
  bool correct = false;
};

// Per metric, per corpus position.
std::vector<std::vector<Prediction>> predict_loocv(std::span<const learn::PageFeatures> corpus,
                                                   std::span<const device::Metric> metrics,
                                                   const device::CostModelParams& params,
                                                   const EvaluationOptions& options,
                                                   std::vector<learn::GridChoice>& hyper) {
  const auto results = learn::loocv(corpus, metrics, params.without_noise(), options.loocv);
  std::vector<std::vector<Prediction>> out;
  for (const auto& r : results) {
    hyper.push_back(r.hyper);
    auto& preds = out.emplace_back();
    for (const auto& row : r.rows) preds.push_back({row.predicted, row.correct});
  }
  return out;
}

}  // namespace

std::vector<EvaluationReport> evaluate(std::span<const learn::PageFeatures> corpus,
                                       std::span<const device::Metric> metrics,
                                       const device::CostModelParams& params,
                                       const EvaluationOptions& options) {
  params.validate();
  if (corpus.empty()) throw ValidationError("evaluation corpus is empty");
  const std::size_t n = corpus.size();
  const auto quiet = params.without_noise();
  const auto configs = device::enumerate_configs();

  std::vector<std::vector<device::WorkloadCost>> costs(n);
  learn::parallel_for(n, [&](std::size_t i) { costs[i] = device::all_costs(corpus[i].raw, quiet); });

  // Which positions are evaluated, and what was predicted for them.
  std::vector<std::size_t> evaluated;
  std::vector<std::vector<Prediction>> predictions(metrics.size(), std::vector<Prediction>(n));
  std::vector<learn::GridChoice> hyper;
  if (options.mode == EvalMode::kLoocv) {
    if (n < 2) throw ValidationError("leave-one-out evaluation needs at least 2 pages");
    predictions = predict_loocv(corpus, metrics, params, options, hyper);
    evaluated.resize(n);
    std::iota(evaluated.begin(), evaluated.end(), 0);
  } else {
    const std::size_t stride = options.holdout_stride;
    if (stride < 2 || n < stride) throw ValidationError("holdout needs at least holdout_stride pages");
    std::vector<learn::PageFeatures> train;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % stride == stride - 1) evaluated.push_back(i);
      else train.push_back(corpus[i]);
    }
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      learn::GridChoice choice;
      const auto model = learn::train_model(train, metrics[m], quiet, options.loocv.grid, &choice);
      hyper.push_back(choice);
      for (std::size_t i : evaluated) {
        const auto predicted = learn::predict_label(model, corpus[i].raw);
        const auto oracle = device::oracle_best(costs[i], metrics[m]).config;
        predictions[m][i] = {predicted, predicted == oracle};
      }
    }
  }

  features::Matrix samples(n, features::kFeatureCount);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < features::kFeatureCount; ++j) samples(i, j) = corpus[i].raw[j];
  }
  std::vector<features::FeatureVector> raws;
  for (const auto& page : corpus) raws.push_back(page.raw);
  const auto hmp = device::hmp_baseline();

  std::vector<EvaluationReport> reports;
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    const auto metric = metrics[m];
    EvaluationReport report;
    report.metric = metric;
    report.mode = options.mode;
    report.params = params;
    report.hyper = hyper[m];
    report.labels.metric = metric;

    std::vector<int> oracle_labels;
    for (std::size_t i = 0; i < n; ++i) {
      const auto best = device::oracle_best(costs[i], metric).config;
      oracle_labels.push_back(static_cast<int>(report.labels.intern(best)));
    }

    report.rows.resize(evaluated.size());
    learn::parallel_for(evaluated.size(), [&](std::size_t k) {
      const std::size_t i = evaluated[k];
      const auto key = device::page_key(corpus[i].id);
      const auto& pred = predictions[m][i];
      const auto oracle = report.labels.configs[static_cast<std::size_t>(oracle_labels[i])];
      auto& row = report.rows[k];
      row.page_id = corpus[i].id;
      row.predicted = pred.predicted;
      row.oracle = oracle;
      row.correct = pred.correct;
      row.hmp = measure(corpus[i].raw, hmp, params, key, options.protocol);
      row.predicted_cost = measure(corpus[i].raw, pred.predicted, params, key, options.protocol);
      row.oracle_cost = measure(corpus[i].raw, oracle, params, key, options.protocol);
      row.oracle_fraction = costs[i][device::config_index(oracle)].value(metric) /
                            costs[i][device::config_index(pred.predicted)].value(metric);
    });
    std::sort(report.rows.begin(), report.rows.end(),
              [](const auto& a, const auto& b) { return a.page_id < b.page_id; });
    report.aggregates = aggregate(metric, report.rows);

    for (const auto& c : report.labels.configs) report.histogram.push_back({c, 0, 0});
    for (int l : oracle_labels) ++report.histogram[static_cast<std::size_t>(l)].oracle_count;
    for (const auto& row : report.rows) {
      auto it = std::find_if(report.histogram.begin(), report.histogram.end(),
                             [&](const auto& h) { return h.config == row.predicted; });
      if (it == report.histogram.end()) {
        report.histogram.push_back({row.predicted, 0, 0});
        it = report.histogram.end() - 1;
      }
      ++it->predicted_count;
    }

    report.sweep = device::fixed_config_sweep(raws, report.labels.configs, metric, quiet);

    std::vector<double> gains(features::kFeatureCount, 0.0);
    if (report.labels.size() > 1) gains = features::information_gain_ratio(samples, oracle_labels);
    const auto& schema = features::FeatureSchema::standard();
    for (std::size_t j = 0; j < features::kFeatureCount; ++j) {
      report.importance.push_back({std::string(schema[j].name), gains[j]});
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

namespace {

ordered_json to_json(const device::WorkloadCost& c) {
  return {{"load_time", c.load_time}, {"energy", c.energy}, {"edp", c.edp}};
}

ordered_json to_json(const Measurement& m) {
  ordered_json doc = to_json(m.mean);
  doc["repetitions"] = m.repetitions;
  doc["ci_ratio"] = m.ci_ratio;
  doc["met"] = m.met;
  return doc;
}

Measurement measurement_from_json(const ordered_json& doc) {
  Measurement m;
  m.mean.load_time = doc.at("load_time").get<double>();
  m.mean.energy = doc.at("energy").get<double>();
  m.mean.edp = doc.at("edp").get<double>();
  m.repetitions = doc.at("repetitions").get<std::size_t>();
  m.ci_ratio = doc.at("ci_ratio").get<double>();
  m.met = doc.at("met").get<bool>();
  return m;
}

}  // namespace

ordered_json to_json(const EvaluationReport& report) {
  ordered_json doc;
  doc["metric"] = std::string(device::to_string(report.metric));
  doc["mode"] = std::string(to_string(report.mode));
  doc["params"] = device::to_json(report.params);
  doc["hyper"] = {{"C", report.hyper.C}, {"gamma", report.hyper.gamma}, {"cv_accuracy", report.hyper.accuracy}};
  const auto& a = report.aggregates;
  doc["aggregates"] = {{"pages", report.rows.size()},
                       {"accuracy", a.accuracy},
                       {"predicted_vs_hmp", a.predicted_vs_hmp},
                       {"oracle_vs_hmp", a.oracle_vs_hmp},
                       {"oracle_fraction", a.oracle_fraction},
                       {"min_ratio", a.min_ratio},
                       {"max_ratio", a.max_ratio},
                       {"measurements", a.measurements},
                       {"repetitions_total", a.repetitions_total},
                       {"repetitions_max", a.repetitions_max},
                       {"ci_met_fraction", a.ci_met_fraction},
                       {"max_ci_ratio", a.max_ci_ratio}};
  auto& labels = doc["labels"] = ordered_json::array();
  for (const auto& c : report.labels.configs) labels.push_back(device::to_string(c));
  auto& hist = doc["histogram"] = ordered_json::array();
  for (const auto& h : report.histogram) {
    hist.push_back({{"config", device::to_string(h.config)},
                    {"oracle", h.oracle_count},
                    {"predicted", h.predicted_count}});
  }
  auto& sweep = doc["sweep"] = ordered_json::array();
  for (const auto& s : report.sweep) {
    sweep.push_back({{"config", device::to_string(s.config)}, {"geomean_vs_hmp", s.geomean_ratio}});
  }
  auto& importance = doc["importance"] = ordered_json::array();
  for (const auto& e : report.importance) {
    importance.push_back({{"feature", e.feature}, {"gain_ratio", e.gain_ratio}});
  }
  auto& rows = doc["rows"] = ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"page_id", r.page_id},
                    {"predicted", device::to_string(r.predicted)},
                    {"oracle", device::to_string(r.oracle)},
                    {"correct", r.correct},
                    {"oracle_fraction", r.oracle_fraction},
                    {"hmp", to_json(r.hmp)},
                    {"predicted_cost", to_json(r.predicted_cost)},
                    {"oracle_cost", to_json(r.oracle_cost)}});
  }
  return doc;
}

EvaluationReport report_from_json(const ordered_json& doc) {
  try {
    EvaluationReport report;
    report.metric = device::parse_metric(doc.at("metric").get<std::string>());
    report.mode = parse_mode(doc.at("mode").get<std::string>());
    report.params = device::params_from_json(doc.at("params"));
    report.hyper = {doc.at("hyper").at("C").get<double>(), doc.at("hyper").at("gamma").get<double>(),
                    doc.at("hyper").at("cv_accuracy").get<double>()};
    report.labels.metric = report.metric;
    for (const auto& c : doc.at("labels")) report.labels.intern(device::parse_config(c.get<std::string>()));
    for (const auto& h : doc.at("histogram")) {
      report.histogram.push_back({device::parse_config(h.at("config").get<std::string>()),
                                  h.at("oracle").get<std::size_t>(), h.at("predicted").get<std::size_t>()});
    }
    for (const auto& s : doc.at("sweep")) {
      report.sweep.push_back({device::parse_config(s.at("config").get<std::string>()),
                              s.at("geomean_vs_hmp").get<double>()});
    }
    for (const auto& e : doc.at("importance")) {
      report.importance.push_back({e.at("feature").get<std::string>(), e.at("gain_ratio").get<double>()});
    }
    for (const auto& r : doc.at("rows")) {
      EvaluationRow row;
      row.page_id = r.at("page_id").get<std::string>();
      row.predicted = device::parse_config(r.at("predicted").get<std::string>());
      row.oracle = device::parse_config(r.at("oracle").get<std::string>());
      row.correct = r.at("correct").get<bool>();
      row.oracle_fraction = r.at("oracle_fraction").get<double>();
      row.hmp = measurement_from_json(r.at("hmp"));
      row.predicted_cost = measurement_from_json(r.at("predicted_cost"));
      row.oracle_cost = measurement_from_json(r.at("oracle_cost"));
      report.rows.push_back(std::move(row));
    }
    report.aggregates = aggregate(report.metric, report.rows);
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed evaluation report: ") + e.what());
  }
}

std::string rows_csv(const EvaluationReport& report) {
  const auto metric = report.metric;
  std::string out =
      "page_id,predicted,oracle,correct,hmp_value,predicted_value,oracle_value,ratio_vs_hmp,"
      "oracle_fraction,hmp_load_time,hmp_energy,predicted_load_time,predicted_energy,"
      "oracle_load_time,oracle_energy,hmp_repetitions,predicted_repetitions,oracle_repetitions,"
      "max_ci_ratio\n";
  char buf[1024];
  for (const auto& r : report.rows) {
    const double ci = std::max({r.hmp.ci_ratio, r.predicted_cost.ci_ratio, r.oracle_cost.ci_ratio});
    std::snprintf(buf, sizeof buf,
                  "%s,\"%s\",\"%s\",%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%zu,%zu,%zu,%.17g\n",
                  r.page_id.c_str(), device::to_string(r.predicted).c_str(),
                  device::to_string(r.oracle).c_str(), r.correct ? 1 : 0, r.hmp.mean.value(metric),
                  r.predicted_cost.mean.value(metric), r.oracle_cost.mean.value(metric),
                  r.predicted_cost.mean.value(metric) / r.hmp.mean.value(metric), r.oracle_fraction,
                  r.hmp.mean.load_time, r.hmp.mean.energy, r.predicted_cost.mean.load_time,
                  r.predicted_cost.mean.energy, r.oracle_cost.mean.load_time, r.oracle_cost.mean.energy,
                  r.hmp.repetitions, r.predicted_cost.repetitions, r.oracle_cost.repetitions, ci);
    out += buf;
  }
  return out;
}

}  // namespace webcfg::app
