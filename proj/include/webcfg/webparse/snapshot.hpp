#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "webcfg/webparse/css.hpp"
#include "webcfg/webparse/html.hpp"

namespace webcfg::webparse {

/// Raw bytes of one page: the HTML document plus its external stylesheets.
struct PageSource {
  std::string html;
  std::vector<std::string> stylesheets;

  std::size_t total_bytes() const;
};

/// Reads `dir/index.html` and every `*.css` file in `dir` (sorted by name).
PageSource load_page_source(const std::filesystem::path& dir);

struct DomSnapshot {
  DomTree tree;
  std::vector<StyleRule> styles;  // inline <style> rules, then external sheets
  std::size_t bytes_consumed = 0;
};

/// Feeds a page through the HTML and CSS parsers in fixed-size chunks. The
/// byte stream is the HTML followed by each stylesheet; each parser is
/// finished as soon as its last byte has been consumed.
class PageStream {
 public:
  PageStream(const PageSource& source, std::size_t chunk_size);

  /// Consumes the next chunk. Returns false once everything was consumed.
  bool advance();
  bool done() const { return exhausted_; }

  const DomTree& tree() const { return html_.tree(); }
  const std::vector<StyleRule>& styles() const { return styles_; }
  std::size_t bytes_consumed() const { return consumed_; }
  std::size_t recovery_events() const { return html_.recovery_events(); }

  DomSnapshot snapshot() const;

 private:
  void refresh_styles();

  const PageSource& source_;
  std::size_t chunk_size_;
  std::size_t total_;
  std::size_t consumed_ = 0;
  HtmlParser html_;
  std::vector<CssStreamParser> sheets_;
  std::vector<bool> segment_finished_;
  bool exhausted_ = false;
  std::size_t inline_blocks_seen_ = 0;
  std::vector<StyleRule> inline_rules_;
  std::vector<StyleRule> styles_;
};

/// One snapshot per consumed chunk; the last equals parse_page().
/// Throws ValidationError when chunk_size is 0.
std::vector<DomSnapshot> snapshot_stream(const PageSource& source, std::size_t chunk_size);

struct ParsedPage {
  DomTree tree;
  std::vector<StyleRule> styles;
  std::size_t total_bytes = 0;
  std::size_t recovery_events = 0;
};

ParsedPage parse_page(const PageSource& source);

}  // namespace webcfg::webparse
