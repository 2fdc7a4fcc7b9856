#pragma once

#include <array>
#include <span>
#include <string>

#include <json.hpp>

#include "webcfg/features/schema.hpp"

namespace webcfg::features {

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;

  bool degenerate() const { return !(max > min); }
  bool operator==(const FeatureRange&) const = default;
};

/// Per-feature min/max recorded on a training set and reused at deployment.
struct NormalizationTable {
  std::string schema_version{kSchemaVersion};
  std::array<FeatureRange, kFeatureCount> ranges{};

  bool operator==(const NormalizationTable&) const = default;
};

/// Column-wise min/max. Throws ValidationError on an empty set or on
/// vectors that are already normalized.
NormalizationTable fit_normalizer(std::span<const FeatureVector> training);

/// (x - min) / (max - min), clamped to [0, 1]; degenerate ranges map to 0.
FeatureVector normalize(const FeatureVector& raw, const NormalizationTable& table);

/// {"<feature name>": {"min": ..., "max": ...}, ...} in schema order.
nlohmann::ordered_json to_json(const NormalizationTable& table);
NormalizationTable normalization_from_json(const nlohmann::ordered_json& doc);

}  // namespace webcfg::features
