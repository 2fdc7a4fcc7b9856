#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "webcfg/device/cost_model.hpp"
#include "webcfg/device/oracle.hpp"
#include "webcfg/features/normalize.hpp"
#include "webcfg/learn/multiclass.hpp"

namespace webcfg::learn {

/// A corpus page reduced to its raw feature vector.
struct PageFeatures {
  std::string id;
  features::FeatureVector raw;
};

struct TrainingData {
  LabelSet labels;
  std::vector<LabeledExample> examples;
  features::NormalizationTable normalization;
};

/// Labels every page with its noise-free oracle optimum for `metric` and
/// normalizes with a table fitted on the corpus. Throws ValidationError on
/// an empty corpus.
TrainingData generate_training_data(std::span<const PageFeatures> corpus, device::Metric metric,
                                    const device::CostModelParams& params);

struct HyperGrid {
  std::vector<double> C{0.1, 1.0, 10.0, 100.0};
  std::vector<double> gamma{0.01 / 73, 0.1 / 73, 1.0 / 73, 10.0 / 73};
  std::size_t folds = 5;
  double tol = 1e-3;
};

struct GridChoice {
  double C = 0.0;
  double gamma = 0.0;
  double accuracy = 0.0;  // mean fold accuracy
};

/// Round-robin fold assignment within each label, labels in index order.
std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels, std::size_t folds);

/// Stratified k-fold grid search. Picks the best mean accuracy; ties go to
/// the smaller C, then the smaller gamma. Throws ValidationError with fewer
/// examples than folds or an empty grid.
GridChoice grid_search(std::span<const LabeledExample> examples, const LabelSet& labels,
                       const HyperGrid& grid);
GridChoice grid_search(std::span<const std::vector<double>> points, const DistanceMatrix& distances,
                       std::span<const std::size_t> labels, const LabelSet& label_set,
                       const HyperGrid& grid);

/// generate_training_data, grid_search and train_multiclass in one step.
MulticlassSvmModel train_model(std::span<const PageFeatures> corpus, device::Metric metric,
                               const device::CostModelParams& params, const HyperGrid& grid,
                               GridChoice* choice = nullptr);

struct LoocvOptions {
  HyperGrid grid;
  /// Grid search inside every fold. Off: one search on the whole corpus
  /// picks (C, gamma) for all folds.
  bool nested_search = false;
};

struct LoocvRow {
  std::string page_id;
  device::ProcessorConfig predicted;
  device::ProcessorConfig oracle;
  device::WorkloadCost predicted_cost;  // noise-free
  device::WorkloadCost oracle_cost;
  device::WorkloadCost hmp_cost;
  bool correct = false;
  bool normalization_refit = false;  // fold table differs from the full-corpus table
};

struct LoocvResult {
  device::Metric metric = device::Metric::kLoadTime;
  std::vector<LoocvRow> rows;  // corpus order
  double accuracy = 0.0;
  GridChoice hyper;  // the shared choice; unset with nested_search
};

/// Leave-one-out: each fold refits normalization and labels on the other
/// pages, trains, and predicts the held-out page. Throws ValidationError
/// on fewer than 2 pages.
LoocvResult loocv(std::span<const PageFeatures> corpus, device::Metric metric,
                  const device::CostModelParams& params, const LoocvOptions& options = {});
/// Several metrics sharing the per-fold distance computation.
std::vector<LoocvResult> loocv(std::span<const PageFeatures> corpus,
                               std::span<const device::Metric> metrics,
                               const device::CostModelParams& params, const LoocvOptions& options = {});

/// Runs body(i) for i in [0, n) on up to hardware_concurrency threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace webcfg::learn
