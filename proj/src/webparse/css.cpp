#include "webcfg/webparse/css.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <iterator>

#include "webcfg/error.hpp"
#include "text.hpp"

namespace webcfg::webparse {

namespace {

constexpr std::array<std::string_view, 5> kGroupingAtRules = {
    "media", "supports", "document", "layer", "container"};

// Removes comments, leaving strings untouched.
std::string strip_comments(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  char quote = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    char c = in[i];
    if (quote) {
      out += c;
      if (c == '\\' && i + 1 < in.size()) {
        out += in[++i];
      } else if (c == quote || c == '\n') {
        quote = 0;
      }
      continue;
    }
    if (c == '/' && i + 1 < in.size() && in[i + 1] == '*') {
      auto end = in.find("*/", i + 2);
      if (end == std::string_view::npos) break;
      i = end + 1;
      out += ' ';
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    out += c;
  }
  return out;
}

std::string collapse_whitespace(std::string_view in) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(in)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

// Splits on `sep` outside strings, parentheses, brackets and braces.
std::vector<std::string_view> split_top_level(std::string_view in, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  char quote = 0;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    char c = in[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    switch (c) {
      case '"':
      case '\'': quote = c; break;
      case '(': case '[': case '{': ++depth; break;
      case ')': case ']': case '}': depth = std::max(0, depth - 1); break;
      default:
        if (c == sep && depth == 0) {
          parts.push_back(in.substr(begin, i - begin));
          begin = i + 1;
        }
    }
  }
  parts.push_back(in.substr(begin));
  return parts;
}

std::vector<SelectorPattern> parse_selectors(std::string_view prelude) {
  std::vector<SelectorPattern> out;
  for (auto part : split_top_level(prelude, ',')) {
    std::string raw = collapse_whitespace(part);
    if (raw.empty()) continue;
    SelectorKind kind = classify_selector(raw);
    out.push_back(SelectorPattern{kind, std::move(raw)});
  }
  return out;
}

std::vector<Declaration> parse_declarations(std::string_view block) {
  std::vector<Declaration> out;
  for (auto part : split_top_level(block, ';')) {
    if (part.find('{') != std::string_view::npos) continue;  // nested rule, not a declaration
    auto colon = part.find(':');
    if (colon == std::string_view::npos) continue;
    auto property = trim(part.substr(0, colon));
    if (property.empty()) continue;
    out.push_back(Declaration{ascii_lower(property), std::string(trim(part.substr(colon + 1)))});
  }
  return out;
}

void parse_items(std::string_view source, std::vector<StyleRule>& out);

// One top-level item: `prelude { block }`, `prelude;`, or a stray `}`.
void interpret_item(std::string_view item, std::vector<StyleRule>& out) {
  std::string text = strip_comments(item);
  std::string_view view(text);
  // Locate the opening brace outside strings.
  std::size_t open = std::string_view::npos;
  char quote = 0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    char c = view[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote || c == '\n') quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '{') {
      open = i;
      break;
    } else if (c == '}' || c == ';') {
      return;  // statement at-rule or junk
    }
  }
  if (open == std::string_view::npos) return;

  std::string_view prelude = trim(view.substr(0, open));
  std::string_view block = view.substr(open + 1);
  // The item ends with the matching brace unless input ran out.
  if (!block.empty() && block.back() == '}') {
    int depth = 0;
    quote = 0;
    std::size_t close = std::string_view::npos;
    for (std::size_t i = 0; i < block.size(); ++i) {
      char c = block[i];
      if (quote) {
        if (c == '\\') ++i;
        else if (c == quote || c == '\n') quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (depth == 0) {
          close = i;
          break;
        }
        --depth;
      }
    }
    if (close != std::string_view::npos) block = block.substr(0, close);
  }

  // HTML comment delimiters are ignored at the top level of a sheet.
  for (std::string_view cdo : {"<!--", "-->"}) {
    while (prelude.substr(0, cdo.size()) == cdo) prelude = trim(prelude.substr(cdo.size()));
  }

  if (!prelude.empty() && prelude.front() == '@') {
    std::size_t i = 1;
    while (i < prelude.size() && !is_space(prelude[i]) && prelude[i] != '(') ++i;
    std::string name = ascii_lower(prelude.substr(1, i - 1));
    if (std::find(kGroupingAtRules.begin(), kGroupingAtRules.end(), name) !=
        kGroupingAtRules.end()) {
      parse_items(block, out);
    }
    return;
  }

  auto selectors = parse_selectors(prelude);
  if (selectors.empty()) return;
  out.push_back(StyleRule{std::move(selectors), parse_declarations(block)});
}

void parse_items(std::string_view source, std::vector<StyleRule>& out) {
  CssStreamParser nested;
  nested.feed(source);
  nested.finish();
  auto rules = nested.rules();
  out.insert(out.end(), rules.begin(), rules.end());
}

}  // namespace

std::string_view to_string(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::kClass: return "class";
    case SelectorKind::kId: return "id";
    case SelectorKind::kElement: return "element";
    case SelectorKind::kDescendant: return "descendant";
  }
  return "element";
}

SelectorKind classify_selector(std::string_view raw) {
  raw = trim(raw);
  for (char c : raw) {
    if (is_space(c) || c == '>') return SelectorKind::kDescendant;
  }
  if (!raw.empty() && raw.front() == '#') return SelectorKind::kId;
  if (!raw.empty() && raw.front() == '.') return SelectorKind::kClass;
  return SelectorKind::kElement;
}

void CssStreamParser::feed(std::string_view chunk) {
  if (finished_) return;
  buf_.append(chunk);
  bytes_fed_ += chunk.size();
  scan(false);
}

void CssStreamParser::finish() {
  if (finished_) return;
  scan(true);
  std::string_view rest = std::string_view(buf_).substr(item_begin_);
  if (!trim(rest).empty()) interpret_item(rest, rules_);
  buf_.clear();
  item_begin_ = scan_pos_ = 0;
  finished_ = true;
}

void CssStreamParser::scan(bool at_eof) {
  const std::size_t n = buf_.size();
  // Keep one byte of lookahead so "/*", "*/" and escapes are never split.
  const std::size_t limit = at_eof ? n : (n == 0 ? 0 : n - 1);
  std::size_t i = scan_pos_;
  while (i < limit) {
    char c = buf_[i];
    char next = i + 1 < n ? buf_[i + 1] : '\0';
    switch (mode_) {
      case Mode::kComment:
        if (c == '*' && next == '/') {
          mode_ = Mode::kNormal;
          ++i;
        }
        break;
      case Mode::kString:
        if (c == '\\') ++i;
        else if (c == quote_ || c == '\n') mode_ = Mode::kNormal;
        break;
      case Mode::kNormal:
        if (c == '/' && next == '*') {
          mode_ = Mode::kComment;
          ++i;
        } else if (c == '"' || c == '\'') {
          mode_ = Mode::kString;
          quote_ = c;
        } else if (c == '{') {
          ++depth_;
        } else if (c == '}' || (c == ';' && depth_ == 0)) {
          if (c == '}' && depth_ > 0) --depth_;
          if (depth_ == 0) {
            interpret_item(std::string_view(buf_).substr(item_begin_, i + 1 - item_begin_), rules_);
            item_begin_ = i + 1;
          }
        }
        break;
    }
    ++i;
  }
  scan_pos_ = std::min(i, n);
  if (item_begin_ > 65536 && item_begin_ * 2 > n) {
    buf_.erase(0, item_begin_);
    scan_pos_ -= item_begin_;
    item_begin_ = 0;
  }
}

std::vector<StyleRule> parse_css(std::string_view source) {
  std::vector<StyleRule> out;
  parse_items(source, out);
  return out;
}

std::vector<StyleRule> parse_css(std::istream& source) {
  std::string bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  if (source.bad()) throw IoError("failed to read CSS stream");
  return parse_css(bytes);
}

}  // namespace webcfg::webparse
