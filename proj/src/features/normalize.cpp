#include "webcfg/features/normalize.hpp"

#include <algorithm>

#include "webcfg/error.hpp"

namespace webcfg::features {

NormalizationTable fit_normalizer(std::span<const FeatureVector> training) {
  if (training.empty()) throw ValidationError("cannot fit a normalizer on an empty training set");
  NormalizationTable table;
  table.schema_version = training.front().schema_version;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    table.ranges[i] = {training.front()[i], training.front()[i]};
  }
  for (const auto& v : training) {
    if (v.normalized) throw ValidationError("normalizer must be fitted on raw vectors");
    if (v.schema_version != table.schema_version) {
      throw SchemaMismatch("mixed schema versions in training set");
    }
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      table.ranges[i].min = std::min(table.ranges[i].min, v[i]);
      table.ranges[i].max = std::max(table.ranges[i].max, v[i]);
    }
  }
  return table;
}

FeatureVector normalize(const FeatureVector& raw, const NormalizationTable& table) {
  if (raw.schema_version != table.schema_version) {
    throw SchemaMismatch("vector schema " + raw.schema_version + " does not match table schema " +
                         table.schema_version);
  }
  if (raw.normalized) throw ValidationError("vector is already normalized");
  FeatureVector out = raw;
  out.normalized = true;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const auto& r = table.ranges[i];
    out[i] = r.degenerate() ? 0.0 : std::clamp((raw[i] - r.min) / (r.max - r.min), 0.0, 1.0);
  }
  return out;
}

nlohmann::ordered_json to_json(const NormalizationTable& table) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  const auto& schema = FeatureSchema::standard();
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    doc[std::string(schema[i].name)] = {{"min", table.ranges[i].min}, {"max", table.ranges[i].max}};
  }
  return doc;
}

NormalizationTable normalization_from_json(const nlohmann::ordered_json& doc) {
  if (!doc.is_object()) throw ValidationError("normalization table must be a JSON object");
  NormalizationTable table;
  const auto& schema = FeatureSchema::standard();
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const std::string name(schema[i].name);
    if (!doc.contains(name)) throw SchemaMismatch("normalization table lacks feature " + name);
    const auto& entry = doc.at(name);
    table.ranges[i] = {entry.at("min").get<double>(), entry.at("max").get<double>()};
    if (table.ranges[i].min > table.ranges[i].max) {
      throw ValidationError("min > max for feature " + name);
    }
  }
  if (doc.size() != kFeatureCount) throw SchemaMismatch("normalization table has extra features");
  return table;
}

}  // namespace webcfg::features
