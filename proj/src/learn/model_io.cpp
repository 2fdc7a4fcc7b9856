#include "webcfg/learn/model_io.hpp"

#include <fstream>

#include "webcfg/error.hpp"

namespace webcfg::learn {

using nlohmann::ordered_json;

ordered_json to_json(const MulticlassSvmModel& model) {
  ordered_json doc;
  doc["format"] = kModelFormat;
  doc["schema_version"] = model.schema_version;
  doc["metric"] = std::string(device::to_string(model.metric));
  auto& labels = doc["labels"] = ordered_json::array();
  for (const auto& c : model.label_set.configs) labels.push_back(device::to_string(c));
  doc["normalization"] = features::to_json(model.normalization);
  doc["constant_label"] = model.constant_label ? ordered_json(*model.constant_label) : ordered_json();
  auto& machines = doc["machines"] = ordered_json::array();
  for (const auto& m : model.machines) {
    ordered_json entry;
    entry["first"] = m.first;
    entry["second"] = m.second;
    entry["gamma"] = m.svm.gamma;
    entry["C"] = m.svm.C;
    entry["bias"] = m.svm.bias;
    entry["coefficients"] = m.svm.coefficients;
    entry["support_vectors"] = m.svm.support_vectors;
    machines.push_back(std::move(entry));
  }
  return doc;
}

MulticlassSvmModel model_from_json(const ordered_json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kModelFormat) {
      throw ValidationError("unsupported model format");
    }
    MulticlassSvmModel model;
    model.schema_version = doc.at("schema_version").get<std::string>();
    if (model.schema_version != features::kSchemaVersion) {
      throw SchemaMismatch("model uses feature schema " + model.schema_version);
    }
    model.metric = device::parse_metric(doc.at("metric").get<std::string>());
    model.label_set.metric = model.metric;
    for (const auto& c : doc.at("labels")) {
      const auto config = device::parse_config(c.get<std::string>());
      if (model.label_set.find(config)) throw ValidationError("duplicate label in model");
      model.label_set.configs.push_back(config);
    }
    if (model.label_set.configs.empty()) throw ValidationError("model has no labels");
    model.normalization = features::normalization_from_json(doc.at("normalization"));
    const auto& constant = doc.at("constant_label");
    if (!constant.is_null()) {
      model.constant_label = constant.get<std::size_t>();
      if (*model.constant_label >= model.label_set.size()) {
        throw ValidationError("constant label outside the label set");
      }
    }
    for (const auto& entry : doc.at("machines")) {
      PairwiseMachine m;
      m.first = entry.at("first").get<std::size_t>();
      m.second = entry.at("second").get<std::size_t>();
      if (m.first >= model.label_set.size() || m.second >= model.label_set.size() ||
          m.first == m.second) {
        throw ValidationError("machine refers to an invalid label pair");
      }
      m.svm.gamma = entry.at("gamma").get<double>();
      m.svm.C = entry.at("C").get<double>();
      m.svm.bias = entry.at("bias").get<double>();
      m.svm.coefficients = entry.at("coefficients").get<std::vector<double>>();
      m.svm.support_vectors = entry.at("support_vectors").get<std::vector<std::vector<double>>>();
      if (m.svm.coefficients.size() != m.svm.support_vectors.size()) {
        throw ValidationError("support vector and coefficient counts differ");
      }
      for (const auto& sv : m.svm.support_vectors) {
        if (sv.size() != features::kFeatureCount) throw ValidationError("support vector has wrong length");
      }
      model.machines.push_back(std::move(m));
    }
    if (!model.constant_label && model.machines.empty()) {
      throw ValidationError("model has neither machines nor a constant label");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const MulticlassSvmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file " + path.string());
  out << to_json(model).dump(1) << '\n';
  if (!out) throw IoError("failed writing model file " + path.string());
}

MulticlassSvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read model file " + path.string());
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("model file " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace webcfg::learn
