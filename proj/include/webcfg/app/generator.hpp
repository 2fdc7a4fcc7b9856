#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "webcfg/app/corpus.hpp"
#include "webcfg/webparse/snapshot.hpp"

namespace webcfg::app {

/// Ranges the per-page targets are drawn from, log-uniformly.
struct SizeProfile {
  std::size_t min_nodes = 4;
  std::size_t max_nodes = 8000;
  double min_kb = 40.0;
  double max_kb = 5120.0;

  /// Throws ValidationError unless 4 <= min_nodes <= max_nodes and
  /// 0 < min_kb <= max_kb.
  void validate() const;
};

/// Targets a generated page was built from. Actual sizes can exceed
/// target_kb when the markup alone is larger.
struct PagePlan {
  std::size_t nodes = 0;
  std::size_t depth = 0;
  double target_kb = 0.0;
  std::size_t rules = 0;
};

/// Builds page `index` of the corpus for `seed`. Pure function of its
/// arguments.
webparse::PageSource generate_page(std::uint64_t seed, std::size_t index, const SizeProfile& profile,
                                   PagePlan* plan = nullptr);

/// Writes `n` pages as `root/page-NNNN/{index.html,style.css}` plus a
/// manifest. Throws ValidationError for n = 0 and IoError when the
/// destination is not writable.
CorpusManifest gen_corpus(const std::filesystem::path& root, std::size_t n, std::uint64_t seed,
                          const SizeProfile& profile = {});

std::string page_id(std::size_t index);

}  // namespace webcfg::app
