#include "webcfg/learn/multiclass.hpp"

#include <algorithm>

#include "webcfg/error.hpp"

namespace webcfg::learn {

std::size_t LabelSet::intern(const device::ProcessorConfig& config) {
  if (auto at = find(config)) return *at;
  configs.push_back(config);
  return configs.size() - 1;
}

std::optional<std::size_t> LabelSet::find(const device::ProcessorConfig& config) const {
  auto it = std::find(configs.begin(), configs.end(), config);
  if (it == configs.end()) return std::nullopt;
  return static_cast<std::size_t>(it - configs.begin());
}

std::size_t MulticlassSvmModel::predict_index(std::span<const double> normalized) const {
  if (constant_label) return *constant_label;
  std::vector<std::size_t> votes(label_set.size(), 0);
  for (const auto& m : machines) {
    ++votes[m.svm.decision(normalized) > 0.0 ? m.first : m.second];
  }
  return static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

std::vector<double> as_point(const features::FeatureVector& v) {
  return std::vector<double>(v.values.begin(), v.values.end());
}

MulticlassSvmModel train_multiclass(std::span<const std::vector<double>> points,
                                    const KernelMatrix& kernel, std::span<const std::size_t> rows,
                                    std::span<const std::size_t> labels, const LabelSet& label_set,
                                    double C, double tol) {
  if (rows.empty()) throw ValidationError("multiclass training needs examples");
  if (rows.size() != labels.size()) throw ValidationError("one label per training row required");
  std::vector<std::vector<std::size_t>> by_label(label_set.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (labels[i] >= label_set.size()) throw ValidationError("label outside the label set");
    by_label[labels[i]].push_back(rows[i]);
  }

  MulticlassSvmModel model;
  model.metric = label_set.metric;
  model.label_set = label_set;
  std::vector<std::size_t> present;
  for (std::size_t l = 0; l < by_label.size(); ++l) {
    if (!by_label[l].empty()) present.push_back(l);
  }
  if (present.size() == 1) {
    model.constant_label = present.front();
    return model;
  }

  for (std::size_t a = 0; a < present.size(); ++a) {
    for (std::size_t b = a + 1; b < present.size(); ++b) {
      std::vector<std::size_t> pair_rows;
      std::vector<int> pair_labels;
      for (std::size_t r : by_label[present[a]]) {
        pair_rows.push_back(r);
        pair_labels.push_back(1);
      }
      for (std::size_t r : by_label[present[b]]) {
        pair_rows.push_back(r);
        pair_labels.push_back(-1);
      }
      auto solution = solve_dual(kernel, pair_rows, pair_labels, C, tol);
      model.machines.push_back(
          {present[a], present[b], make_machine(points, pair_rows, pair_labels, solution, C, kernel.gamma())});
    }
  }
  return model;
}

MulticlassSvmModel train_multiclass(std::span<const LabeledExample> examples, const LabelSet& labels,
                                    double C, double gamma,
                                    const features::NormalizationTable& normalization, double tol) {
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> y;
  for (const auto& ex : examples) {
    if (!ex.features.normalized) throw ValidationError("training examples must be normalized");
    rows.push_back(points.size());
    points.push_back(as_point(ex.features));
    y.push_back(ex.label);
  }
  auto model = train_multiclass(points, KernelMatrix(points, gamma), rows, y, labels, C, tol);
  model.normalization = normalization;
  model.schema_version = normalization.schema_version;
  return model;
}

device::ProcessorConfig predict_label(const MulticlassSvmModel& model, const features::FeatureVector& raw) {
  if (raw.schema_version != model.schema_version) {
    throw SchemaMismatch("feature schema " + raw.schema_version + " does not match model schema " +
                         model.schema_version);
  }
  const auto v = features::normalize(raw, model.normalization);
  return model.label_set.configs.at(model.predict_index(v.values));
}

}  // namespace webcfg::learn
