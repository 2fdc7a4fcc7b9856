#include "webcfg/app/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "webcfg/error.hpp"
#include "webcfg/features/extract.hpp"

namespace webcfg::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void validate(const CorpusManifest& manifest) {
  std::set<std::string> seen;
  for (const auto& page : manifest.pages) {
    if (page.id.empty()) throw ValidationError("corpus page with an empty id");
    if (!seen.insert(page.id).second) throw ValidationError("duplicate page id " + page.id);
    if (!fs::is_regular_file(manifest.page_dir(page) / "index.html")) {
      throw ValidationError("page " + page.id + " has no index.html");
    }
  }
}

}  // namespace

ordered_json to_json(const CorpusManifest& manifest) {
  ordered_json doc;
  doc["seed"] = manifest.seed ? ordered_json(*manifest.seed) : ordered_json();
  auto& pages = doc["pages"] = ordered_json::array();
  for (const auto& p : manifest.pages) {
    pages.push_back({{"id", p.id}, {"dir", p.dir.generic_string()}, {"bytes", p.bytes}});
  }
  return doc;
}

void write_manifest(const CorpusManifest& manifest) {
  const auto path = manifest.root / kManifestName;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(manifest).dump(1) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

CorpusManifest load_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) throw ValidationError("corpus directory " + root.string() + " not found");
  CorpusManifest manifest;
  manifest.root = root;
  const auto manifest_path = root / kManifestName;
  if (fs::is_regular_file(manifest_path)) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw IoError("cannot read " + manifest_path.string());
    try {
      const auto doc = ordered_json::parse(in);
      if (doc.contains("seed") && !doc["seed"].is_null()) manifest.seed = doc["seed"].get<std::uint64_t>();
      for (const auto& p : doc.at("pages")) {
        manifest.pages.push_back({p.at("id").get<std::string>(), fs::path(p.at("dir").get<std::string>()),
                                  p.value("bytes", std::size_t{0})});
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("malformed corpus manifest: " + std::string(e.what()));
    }
  } else {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (!entry.is_directory() || !fs::is_regular_file(entry.path() / "index.html")) continue;
      CorpusEntry page{entry.path().filename().string(), entry.path().filename(), 0};
      for (const auto& f : fs::directory_iterator(entry.path())) {
        const auto ext = f.path().extension();
        if (f.is_regular_file() && (f.path().filename() == "index.html" || ext == ".css")) {
          page.bytes += static_cast<std::size_t>(f.file_size());
        }
      }
      manifest.pages.push_back(std::move(page));
    }
  }
  std::sort(manifest.pages.begin(), manifest.pages.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  validate(manifest);
  return manifest;
}

std::vector<learn::PageFeatures> extract_corpus(const CorpusManifest& manifest) {
  std::vector<learn::PageFeatures> out(manifest.pages.size());
  learn::parallel_for(out.size(), [&](std::size_t i) {
    const auto& entry = manifest.pages[i];
    const auto source = webparse::load_page_source(manifest.page_dir(entry));
    out[i] = {entry.id, features::extract_features(webparse::parse_page(source))};
  });
  return out;
}

}  // namespace webcfg::app
