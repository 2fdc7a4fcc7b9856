#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace webcfg::webparse {

enum class SelectorKind { kClass, kId, kElement, kDescendant };

std::string_view to_string(SelectorKind kind);

/// Classifies a single selector by its raw text. Any whitespace or `>`
/// makes it a descendant selector; otherwise the leading character decides
/// (`#` id, `.` class, anything else element). `div.a` is an element
/// selector.
SelectorKind classify_selector(std::string_view raw);

struct SelectorPattern {
  SelectorKind kind = SelectorKind::kElement;
  std::string raw;  // trimmed, inner whitespace collapsed

  bool operator==(const SelectorPattern&) const = default;
};

struct Declaration {
  std::string property;  // lowercase
  std::string value;

  bool operator==(const Declaration&) const = default;
};

struct StyleRule {
  std::vector<SelectorPattern> selectors;  // never empty
  std::vector<Declaration> declarations;

  bool operator==(const StyleRule&) const = default;
};

/// Splits stylesheet bytes into top-level items and turns every
/// recoverable style rule into a StyleRule. Rules nested in @media,
/// @supports, @document, @layer and @container are included; other
/// at-rules are skipped.
std::vector<StyleRule> parse_css(std::string_view source);
std::vector<StyleRule> parse_css(std::istream& source);

/// Streaming variant. Rules are emitted as soon as their top-level item is
/// terminated; finish() recovers an item cut off by end of input. Feeding a
/// sheet in any chunking and finishing gives the same rules as parse_css().
class CssStreamParser {
 public:
  void feed(std::string_view chunk);
  void finish();

  std::span<const StyleRule> rules() const { return rules_; }
  std::size_t bytes_fed() const { return bytes_fed_; }

 private:
  enum class Mode { kNormal, kComment, kString };

  void scan(bool at_eof);

  std::string buf_;
  std::size_t item_begin_ = 0;
  std::size_t scan_pos_ = 0;
  int depth_ = 0;
  Mode mode_ = Mode::kNormal;
  char quote_ = 0;
  std::vector<StyleRule> rules_;
  std::size_t bytes_fed_ = 0;
  bool finished_ = false;
};

}  // namespace webcfg::webparse
