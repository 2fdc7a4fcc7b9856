#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "webcfg/learn/training.hpp"

namespace webcfg::app {

struct CorpusEntry {
  std::string id;
  std::filesystem::path dir;  // relative to the corpus root
  std::size_t bytes = 0;      // index.html plus stylesheets
};

struct CorpusManifest {
  std::filesystem::path root;
  std::vector<CorpusEntry> pages;  // sorted by id
  std::optional<std::uint64_t> seed;

  std::filesystem::path page_dir(const CorpusEntry& entry) const { return root / entry.dir; }
};

inline constexpr const char* kManifestName = "manifest.json";

/// Reads `root/manifest.json` if present, otherwise treats every
/// subdirectory holding an index.html as a page named after the directory.
/// Throws ValidationError for duplicate ids or pages without index.html.
CorpusManifest load_corpus(const std::filesystem::path& root);
void write_manifest(const CorpusManifest& manifest);
nlohmann::ordered_json to_json(const CorpusManifest& manifest);

/// Parses every page and extracts its raw feature vector, in manifest order.
std::vector<learn::PageFeatures> extract_corpus(const CorpusManifest& manifest);

}  // namespace webcfg::app
