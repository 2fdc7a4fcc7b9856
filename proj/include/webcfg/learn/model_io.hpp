#pragma once

#include <filesystem>

#include <json.hpp>

#include "webcfg/learn/multiclass.hpp"

namespace webcfg::learn {

inline constexpr const char* kModelFormat = "webcfg-svm-model-v1";

/// Doubles are written in shortest round-trip form, so load(save(m)) == m.
nlohmann::ordered_json to_json(const MulticlassSvmModel& model);
/// Throws ValidationError on malformed documents, SchemaMismatch on an
/// unknown feature schema.
MulticlassSvmModel model_from_json(const nlohmann::ordered_json& doc);

/// Throws IoError when the file cannot be written or read.
void save_model(const MulticlassSvmModel& model, const std::filesystem::path& path);
MulticlassSvmModel load_model(const std::filesystem::path& path);

}  // namespace webcfg::learn
