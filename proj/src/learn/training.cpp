#include "webcfg/learn/training.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "webcfg/error.hpp"

namespace webcfg::learn {

namespace {

struct CorpusCosts {
  std::vector<std::vector<device::WorkloadCost>> costs;  // per page, per config
};

CorpusCosts cost_table(std::span<const PageFeatures> corpus, const device::CostModelParams& params) {
  CorpusCosts out;
  out.costs.resize(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) { out.costs[i] = device::all_costs(corpus[i].raw, params); });
  return out;
}

std::size_t argmin(std::span<const device::WorkloadCost> costs, device::Metric metric) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < costs.size(); ++i) {
    if (costs[i].value(metric) < costs[best].value(metric)) best = i;
  }
  return best;
}

std::vector<std::vector<double>> normalized_points(std::span<const PageFeatures> corpus,
                                                   std::span<const std::size_t> rows,
                                                   const features::NormalizationTable& table) {
  std::vector<std::vector<double>> points;
  points.reserve(rows.size());
  for (std::size_t r : rows) points.push_back(as_point(features::normalize(corpus[r].raw, table)));
  return points;
}

features::NormalizationTable fit_rows(std::span<const PageFeatures> corpus,
                                      std::span<const std::size_t> rows) {
  std::vector<features::FeatureVector> raws;
  raws.reserve(rows.size());
  for (std::size_t r : rows) raws.push_back(corpus[r].raw);
  return features::fit_normalizer(raws);
}

void check_grid(const HyperGrid& grid) {
  if (grid.C.empty() || grid.gamma.empty()) throw ValidationError("hyperparameter grid is empty");
  if (grid.folds < 2) throw ValidationError("grid search needs at least 2 folds");
}

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

TrainingData generate_training_data(std::span<const PageFeatures> corpus, device::Metric metric,
                                    const device::CostModelParams& params) {
  if (corpus.empty()) throw ValidationError("training corpus is empty");
  TrainingData data;
  data.labels.metric = metric;
  std::vector<features::FeatureVector> raws;
  for (const auto& page : corpus) raws.push_back(page.raw);
  data.normalization = features::fit_normalizer(raws);
  for (const auto& page : corpus) {
    const auto best = device::oracle_best(page.raw, metric, params);
    data.examples.push_back(
        {page.id, features::normalize(page.raw, data.normalization), data.labels.intern(best.config)});
  }
  return data;
}

std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels, std::size_t folds) {
  std::vector<std::size_t> fold(labels.size(), 0);
  std::map<std::size_t, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);
  std::size_t next = 0;
  for (const auto& [label, members] : by_label) {
    for (std::size_t i : members) fold[i] = next++ % folds;
  }
  return fold;
}

GridChoice grid_search(std::span<const std::vector<double>> points, const DistanceMatrix& distances,
                       std::span<const std::size_t> labels, const LabelSet& label_set,
                       const HyperGrid& grid) {
  check_grid(grid);
  const std::size_t n = points.size();
  if (n < grid.folds) throw ValidationError("grid search needs at least as many examples as folds");
  const auto fold = stratified_folds(labels, grid.folds);

  std::vector<double> Cs = grid.C;
  std::vector<double> gammas = grid.gamma;
  std::sort(Cs.begin(), Cs.end());
  std::sort(gammas.begin(), gammas.end());

  // fold_accuracy[(c * gammas + g) * folds + f]
  std::vector<double> fold_accuracy(Cs.size() * gammas.size() * grid.folds, 0.0);
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    const KernelMatrix kernel(distances, gammas[g]);
    parallel_for(Cs.size() * grid.folds, [&](std::size_t job) {
      const std::size_t c = job / grid.folds;
      const std::size_t f = job % grid.folds;
      std::vector<std::size_t> rows;
      std::vector<std::size_t> y;
      for (std::size_t i = 0; i < n; ++i) {
        if (fold[i] != f) {
          rows.push_back(i);
          y.push_back(labels[i]);
        }
      }
      const auto model = train_multiclass(points, kernel, rows, y, label_set, Cs[c], grid.tol);
      std::size_t hits = 0;
      std::size_t tested = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (fold[i] != f) continue;
        ++tested;
        if (model.predict_index(points[i]) == labels[i]) ++hits;
      }
      fold_accuracy[(c * gammas.size() + g) * grid.folds + f] =
          tested ? static_cast<double>(hits) / static_cast<double>(tested) : 0.0;
    });
  }

  GridChoice best{Cs.front(), gammas.front(), -1.0};
  for (std::size_t c = 0; c < Cs.size(); ++c) {
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      double sum = 0.0;
      for (std::size_t f = 0; f < grid.folds; ++f) {
        sum += fold_accuracy[(c * gammas.size() + g) * grid.folds + f];
      }
      const double mean = sum / static_cast<double>(grid.folds);
      if (mean > best.accuracy) best = {Cs[c], gammas[g], mean};
    }
  }
  return best;
}

GridChoice grid_search(std::span<const LabeledExample> examples, const LabelSet& labels,
                       const HyperGrid& grid) {
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> y;
  for (const auto& ex : examples) {
    points.push_back(as_point(ex.features));
    y.push_back(ex.label);
  }
  return grid_search(points, DistanceMatrix(points), y, labels, grid);
}

MulticlassSvmModel train_model(std::span<const PageFeatures> corpus, device::Metric metric,
                               const device::CostModelParams& params, const HyperGrid& grid,
                               GridChoice* choice) {
  check_grid(grid);
  const auto data = generate_training_data(corpus, metric, params);
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> y;
  for (const auto& ex : data.examples) {
    rows.push_back(points.size());
    points.push_back(as_point(ex.features));
    y.push_back(ex.label);
  }
  GridChoice picked{*std::min_element(grid.C.begin(), grid.C.end()),
                    *std::min_element(grid.gamma.begin(), grid.gamma.end()), 1.0};
  const DistanceMatrix distances(points);
  if (data.labels.size() > 1) {
    HyperGrid local = grid;
    local.folds = std::min(grid.folds, points.size());
    picked = grid_search(points, distances, y, data.labels, local);
  }
  auto model = train_multiclass(points, KernelMatrix(distances, picked.gamma), rows, y, data.labels,
                                picked.C, grid.tol);
  model.normalization = data.normalization;
  model.schema_version = data.normalization.schema_version;
  if (choice) *choice = picked;
  return model;
}

std::vector<LoocvResult> loocv(std::span<const PageFeatures> corpus,
                               std::span<const device::Metric> metrics,
                               const device::CostModelParams& params, const LoocvOptions& options) {
  const std::size_t n = corpus.size();
  if (n < 2) throw ValidationError("leave-one-out needs at least 2 pages");
  check_grid(options.grid);
  const auto table = cost_table(corpus, params);
  const std::size_t hmp = device::config_index(device::hmp_baseline());
  const auto configs = device::enumerate_configs();

  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;
  const auto full_table = fit_rows(corpus, all_rows);

  std::vector<LoocvResult> results(metrics.size());
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    results[m].metric = metrics[m];
    results[m].rows.resize(n);
  }

  if (!options.nested_search) {
    const auto points = normalized_points(corpus, all_rows, full_table);
    const DistanceMatrix distances(points);
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      LabelSet labels{metrics[m], {}};
      std::vector<std::size_t> y;
      for (std::size_t i = 0; i < n; ++i) {
        y.push_back(labels.intern(configs[argmin(table.costs[i], metrics[m])]));
      }
      if (labels.size() > 1) {
        HyperGrid local = options.grid;
        local.folds = std::min(local.folds, n);
        results[m].hyper = grid_search(points, distances, y, labels, local);
      } else {
        results[m].hyper = {options.grid.C.front(), options.grid.gamma.front(), 1.0};
      }
    }
  }

  parallel_for(n, [&](std::size_t held_out) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != held_out) rows.push_back(i);
    }
    const auto fold_table = fit_rows(corpus, rows);
    const auto points = normalized_points(corpus, rows, fold_table);
    const auto query = as_point(features::normalize(corpus[held_out].raw, fold_table));
    const DistanceMatrix distances(points);
    std::vector<std::size_t> local_rows(points.size());
    for (std::size_t i = 0; i < local_rows.size(); ++i) local_rows[i] = i;
    std::map<double, KernelMatrix> kernels;

    for (std::size_t m = 0; m < metrics.size(); ++m) {
      const auto metric = metrics[m];
      LabelSet labels{metric, {}};
      std::vector<std::size_t> y;
      for (std::size_t r : rows) y.push_back(labels.intern(configs[argmin(table.costs[r], metric)]));

      GridChoice hyper = results[m].hyper;
      if (options.nested_search && labels.size() > 1) {
        HyperGrid local = options.grid;
        local.folds = std::min(local.folds, points.size());
        hyper = grid_search(points, distances, y, labels, local);
      }
      auto it = kernels.find(hyper.gamma);
      if (it == kernels.end()) it = kernels.emplace(hyper.gamma, KernelMatrix(distances, hyper.gamma)).first;
      const auto model = train_multiclass(points, it->second, local_rows, y, labels, hyper.C,
                                          options.grid.tol);

      const auto& costs = table.costs[held_out];
      const std::size_t oracle = argmin(costs, metric);
      const auto predicted = labels.configs[model.predict_index(query)];
      auto& row = results[m].rows[held_out];
      row.page_id = corpus[held_out].id;
      row.predicted = predicted;
      row.oracle = configs[oracle];
      row.predicted_cost = costs[device::config_index(predicted)];
      row.oracle_cost = costs[oracle];
      row.hmp_cost = costs[hmp];
      row.correct = predicted == configs[oracle];
      row.normalization_refit = !(fold_table == full_table);
    }
  });

  for (auto& result : results) {
    std::size_t hits = 0;
    for (const auto& row : result.rows) hits += row.correct ? 1 : 0;
    result.accuracy = static_cast<double>(hits) / static_cast<double>(n);
    if (options.nested_search) result.hyper = {};
  }
  return results;
}

LoocvResult loocv(std::span<const PageFeatures> corpus, device::Metric metric,
                  const device::CostModelParams& params, const LoocvOptions& options) {
  const device::Metric one[] = {metric};
  return std::move(loocv(corpus, one, params, options).front());
}

}  // namespace webcfg::learn
