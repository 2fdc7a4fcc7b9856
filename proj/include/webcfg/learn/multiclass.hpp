#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "webcfg/device/config.hpp"
#include "webcfg/features/normalize.hpp"
#include "webcfg/learn/svm.hpp"

namespace webcfg::learn {

/// Distinct optimal configurations for one metric, in first-seen order.
struct LabelSet {
  device::Metric metric = device::Metric::kLoadTime;
  std::vector<device::ProcessorConfig> configs;

  std::size_t size() const { return configs.size(); }
  /// Index of `config`, appending it if new.
  std::size_t intern(const device::ProcessorConfig& config);
  std::optional<std::size_t> find(const device::ProcessorConfig& config) const;

  bool operator==(const LabelSet&) const = default;
};

struct LabeledExample {
  std::string page_id;
  features::FeatureVector features;  // normalized
  std::size_t label = 0;
};

/// Machine deciding `first` (decision > 0) against `second`.
struct PairwiseMachine {
  std::size_t first = 0;
  std::size_t second = 0;
  BinarySvm svm;

  bool operator==(const PairwiseMachine&) const = default;
};

/// One-vs-one RBF classifier over a LabelSet. When only one label has
/// examples it holds no machines and always answers that label.
struct MulticlassSvmModel {
  device::Metric metric = device::Metric::kLoadTime;
  LabelSet label_set;
  std::vector<PairwiseMachine> machines;
  features::NormalizationTable normalization;
  std::string schema_version{features::kSchemaVersion};
  std::optional<std::size_t> constant_label;

  /// Majority vote over the machines; ties go to the lowest label index.
  std::size_t predict_index(std::span<const double> normalized) const;

  bool operator==(const MulticlassSvmModel&) const = default;
};

/// Trains one machine per pair of labels that have examples. Throws
/// ValidationError when there are no examples or a label is out of range.
MulticlassSvmModel train_multiclass(std::span<const LabeledExample> examples, const LabelSet& labels,
                                    double C, double gamma,
                                    const features::NormalizationTable& normalization,
                                    double tol = 1e-3);

/// Same, on a precomputed kernel over `points`; `rows` picks the training
/// subset and `labels[i]` belongs to rows[i]. The result has no
/// normalization table.
MulticlassSvmModel train_multiclass(std::span<const std::vector<double>> points,
                                    const KernelMatrix& kernel, std::span<const std::size_t> rows,
                                    std::span<const std::size_t> labels, const LabelSet& label_set,
                                    double C, double tol = 1e-3);

/// Normalizes `raw` with the model's table and returns the voted config.
/// Throws SchemaMismatch if the vector's schema differs from the model's.
device::ProcessorConfig predict_label(const MulticlassSvmModel& model, const features::FeatureVector& raw);

std::vector<double> as_point(const features::FeatureVector& v);

}  // namespace webcfg::learn
