#include "webcfg/webparse/html.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <iterator>
#include <optional>
#include <sstream>
#include <utility>

#include "webcfg/error.hpp"
#include "text.hpp"

namespace webcfg::webparse {

namespace {

constexpr std::array<std::string_view, 14> kVoidElements = {
    "area", "base", "br", "col", "embed", "hr", "img",
    "input", "link", "meta", "param", "source", "track", "wbr"};

// Elements whose content is opaque text up to the matching end tag.
constexpr std::array<std::string_view, 9> kRawTextElements = {
    "script", "style", "textarea", "title", "xmp", "iframe", "noembed", "noframes", "noscript"};

// Start tags that close an open <p>.
constexpr std::array<std::string_view, 30> kClosesParagraph = {
    "address", "article", "aside", "blockquote", "center", "details", "dialog", "dir",
    "div", "dl", "fieldset", "figcaption", "figure", "footer", "form", "h1",
    "h2", "h3", "h4", "h5", "h6", "header", "hr", "main",
    "menu", "nav", "ol", "p", "section", "table"};

constexpr std::array<std::string_view, 10> kButtonScope = {
    "html", "table", "td", "th", "caption", "marquee", "object", "applet", "template", "button"};
constexpr std::array<std::string_view, 4> kListScope = {"ul", "ol", "table", "html"};
constexpr std::array<std::string_view, 3> kDefinitionScope = {"dl", "table", "html"};
constexpr std::array<std::string_view, 2> kTableScope = {"table", "html"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view value) {
  return std::find(set.begin(), set.end(), value) != set.end();
}

bool is_heading(std::string_view tag) {
  return tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6';
}

struct TagToken {
  std::string name;
  std::vector<Attribute> attributes;
  bool self_closing = false;
  std::size_t end = 0;  // one past '>'
};

void append_utf8(std::string& out, unsigned long cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Decodes the handful of character references that matter for attribute
// round-trips. Unknown references are kept verbatim.
std::string decode_entities(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size();) {
    if (in[i] != '&') {
      out += in[i++];
      continue;
    }
    auto semi = in.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += in[i++];
      continue;
    }
    std::string_view ref = in.substr(i + 1, semi - i - 1);
    bool ok = true;
    if (ref == "amp") {
      out += '&';
    } else if (ref == "lt") {
      out += '<';
    } else if (ref == "gt") {
      out += '>';
    } else if (ref == "quot") {
      out += '"';
    } else if (ref == "apos") {
      out += '\'';
    } else if (ref.size() > 1 && ref[0] == '#') {
      bool hex = ref[1] == 'x' || ref[1] == 'X';
      std::string_view digits = ref.substr(hex ? 2 : 1);
      unsigned long cp = 0;
      ok = !digits.empty();
      for (char c : digits) {
        int d = -1;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        if (d < 0 || cp > 0x10FFFF) {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(d);
      }
      if (ok) append_utf8(out, cp);
    } else {
      ok = false;
    }
    if (ok) {
      i = semi + 1;
    } else {
      out += in[i++];
    }
  }
  return out;
}

// Parses a start tag beginning at buf[pos] == '<'. Returns nullopt when the
// tag is not yet terminated inside the buffer.
std::optional<TagToken> scan_start_tag(std::string_view buf, std::size_t pos) {
  TagToken tok;
  std::size_t i = pos + 1;
  const std::size_t n = buf.size();
  std::size_t name_begin = i;
  while (i < n && !is_space(buf[i]) && buf[i] != '/' && buf[i] != '>') ++i;
  if (i >= n) return std::nullopt;
  tok.name = ascii_lower(buf.substr(name_begin, i - name_begin));

  while (true) {
    while (i < n && (is_space(buf[i]) || buf[i] == '/')) {
      if (buf[i] == '/' && i + 1 < n && buf[i + 1] == '>') tok.self_closing = true;
      ++i;
    }
    if (i >= n) return std::nullopt;
    if (buf[i] == '>') {
      tok.end = i + 1;
      return tok;
    }
    tok.self_closing = false;
    std::size_t attr_begin = i++;
    while (i < n && !is_space(buf[i]) && buf[i] != '/' && buf[i] != '>' && buf[i] != '=') ++i;
    if (i >= n) return std::nullopt;
    Attribute attr{ascii_lower(buf.substr(attr_begin, i - attr_begin)), {}};
    std::size_t j = i;
    while (j < n && is_space(buf[j])) ++j;
    if (j >= n) return std::nullopt;
    if (buf[j] == '=') {
      ++j;
      while (j < n && is_space(buf[j])) ++j;
      if (j >= n) return std::nullopt;
      if (buf[j] == '"' || buf[j] == '\'') {
        auto close = buf.find(buf[j], j + 1);
        if (close == std::string_view::npos) return std::nullopt;
        attr.value = decode_entities(buf.substr(j + 1, close - j - 1));
        i = close + 1;
      } else {
        std::size_t v = j;
        while (j < n && !is_space(buf[j]) && buf[j] != '>') ++j;
        if (j >= n) return std::nullopt;
        attr.value = decode_entities(buf.substr(v, j - v));
        i = j;
      }
    }
    tok.attributes.push_back(std::move(attr));
  }
}

}  // namespace

DomTree::DomTree() { nodes_.emplace_back(); }

std::size_t DomTree::append_child(std::size_t parent, std::string tag_name,
                                  std::vector<Attribute> attributes) {
  const std::size_t index = nodes_.size();
  const std::size_t level = nodes_.at(parent).level + 1;
  nodes_.push_back(DomNode{std::move(tag_name), std::move(attributes), {}, parent, level});
  nodes_[parent].children.push_back(index);
  depth_ = std::max(depth_, level);
  return index;
}

bool is_void_element(std::string_view tag) { return contains(kVoidElements, tag); }

void HtmlParser::feed(std::string_view chunk) {
  if (finished_) return;
  buf_.append(chunk);
  bytes_fed_ += chunk.size();
  tree_.set_source_bytes(bytes_fed_);
  process();
}

void HtmlParser::finish() {
  if (finished_) return;
  finishing_ = true;
  process();
  // Whatever is left is an unterminated token; browsers drop those.
  if (!raw_tag_.empty()) {
    if (raw_tag_ == "style") {
      style_text_.append(buf_, pos_, std::string::npos);
      style_blocks_.push_back(std::exchange(style_text_, {}));
    }
    raw_tag_.clear();
  }
  buf_.clear();
  pos_ = 0;
  recovery_events_ += open_.size();
  while (!open_.empty()) close_through(open_.size() - 1);
  finished_ = true;
}

void HtmlParser::process() {
  while (pos_ < buf_.size() && step()) {
  }
  compact();
}

void HtmlParser::compact() {
  if (pos_ > 4096 && pos_ * 2 > buf_.size()) {
    buf_.erase(0, pos_);
    raw_scan_ = raw_scan_ > pos_ ? raw_scan_ - pos_ : 0;
    pos_ = 0;
  }
}

bool HtmlParser::step() {
  if (!raw_tag_.empty()) return consume_raw_text();
  if (buf_[pos_] != '<') {
    auto lt = buf_.find('<', pos_);
    pos_ = lt == std::string::npos ? buf_.size() : lt;
    return true;
  }
  return consume_markup();
}

bool HtmlParser::consume_raw_text() {
  const std::size_t len = raw_tag_.size() + 2;
  std::size_t from = std::max(pos_, raw_scan_);
  while (true) {
    auto lt = buf_.find("</", from);
    if (lt == std::string::npos || lt + len >= buf_.size()) {
      // Need the byte after "</name" to decide.
      if (finishing_) return false;
      raw_scan_ = lt == std::string::npos ? (buf_.size() > 1 ? buf_.size() - 1 : 0) : lt;
      return false;
    }
    if (iequals(std::string_view(buf_).substr(lt + 2, raw_tag_.size()), raw_tag_)) {
      char after = buf_[lt + len];
      if (is_space(after) || after == '/' || after == '>') {
        if (raw_tag_ == "style") style_text_.append(buf_, pos_, lt - pos_);
        pos_ = lt;
        raw_tag_.clear();
        raw_scan_ = 0;
        return true;
      }
    }
    from = lt + 1;
  }
}

bool HtmlParser::consume_markup() {
  std::string_view buf(buf_);
  const std::size_t avail = buf.size() - pos_;
  if (avail < 2) {
    if (finishing_) pos_ = buf.size();
    return false;
  }
  const char next = buf[pos_ + 1];
  if (next == '!') {
    if (avail < 4) {
      if (!finishing_) return false;
    }
    if (buf.substr(pos_, 4) == "<!--") {
      auto end = buf.find("-->", pos_ + 4);
      if (end == std::string_view::npos) {
        if (finishing_) pos_ = buf.size();
        return false;
      }
      pos_ = end + 3;
      return true;
    }
  }
  if (next == '!' || next == '?') {
    auto gt = buf.find('>', pos_ + 2);
    if (gt == std::string_view::npos) {
      if (finishing_) pos_ = buf.size();
      return false;
    }
    pos_ = gt + 1;
    return true;
  }
  if (next == '/') {
    if (avail < 3) {
      if (finishing_) pos_ = buf.size();
      return false;
    }
    auto gt = buf.find('>', pos_ + 2);
    if (gt == std::string_view::npos) {
      if (finishing_) pos_ = buf.size();
      return false;
    }
    const char first = buf[pos_ + 2];
    if (is_alpha(first)) {
      std::size_t i = pos_ + 2;
      while (i < gt && !is_space(buf[i]) && buf[i] != '/') ++i;
      std::string name = ascii_lower(buf.substr(pos_ + 2, i - pos_ - 2));
      pos_ = gt + 1;
      end_tag(name);
    } else {
      pos_ = gt + 1;  // "</>" or bogus comment
    }
    return true;
  }
  if (is_alpha(next)) {
    auto tok = scan_start_tag(buf, pos_);
    if (!tok) {
      if (finishing_) pos_ = buf.size();
      return false;
    }
    pos_ = tok->end;
    start_tag(std::move(tok->name), std::move(tok->attributes), tok->self_closing);
    return true;
  }
  ++pos_;  // a lone '<' is text
  return true;
}

std::size_t HtmlParser::find_open(std::string_view name,
                                  std::span<const std::string_view> boundaries) const {
  for (std::size_t k = open_.size(); k-- > 0;) {
    const auto& tag = tree_.node(open_[k]).tag_name;
    if (tag == name) return k;
    if (std::find(boundaries.begin(), boundaries.end(), tag) != boundaries.end()) break;
  }
  return open_.size();
}

void HtmlParser::close_through(std::size_t stack_pos) { open_.resize(stack_pos); }

void HtmlParser::auto_close_for(std::string_view name) {
  auto implicit_close = [this](std::size_t k) {
    if (k >= open_.size()) return;
    recovery_events_ += open_.size() - k;
    close_through(k);
  };

  if (contains(kClosesParagraph, name)) implicit_close(find_open("p", kButtonScope));
  if (is_heading(name) && !open_.empty() && is_heading(tree_.node(open_.back()).tag_name)) {
    implicit_close(open_.size() - 1);
  }
  if (name == "li") {
    implicit_close(find_open("li", kListScope));
  } else if (name == "dd" || name == "dt") {
    std::size_t dd = find_open("dd", kDefinitionScope);
    std::size_t dt = find_open("dt", kDefinitionScope);
    implicit_close(dd == open_.size() ? dt : (dt == open_.size() ? dd : std::max(dd, dt)));
  } else if (name == "td" || name == "th") {
    std::size_t td = find_open("td", kTableScope);
    std::size_t th = find_open("th", kTableScope);
    implicit_close(td == open_.size() ? th : (th == open_.size() ? td : std::max(td, th)));
  } else if (name == "tr") {
    implicit_close(find_open("tr", kTableScope));
  } else if (name == "tbody" || name == "thead" || name == "tfoot") {
    std::size_t best = open_.size();
    for (std::string_view section : {"tbody", "thead", "tfoot"}) {
      std::size_t k = find_open(section, kTableScope);
      if (k != open_.size()) best = best == open_.size() ? k : std::max(best, k);
    }
    implicit_close(best);
  } else if (name == "option") {
    if (!open_.empty() && tree_.node(open_.back()).tag_name == "option") {
      implicit_close(open_.size() - 1);
    }
  }
}

void HtmlParser::start_tag(std::string name, std::vector<Attribute> attributes,
                           bool self_closing) {
  auto_close_for(name);

  // First occurrence of an attribute wins.
  std::vector<Attribute> unique;
  unique.reserve(attributes.size());
  for (auto& attr : attributes) {
    bool seen = std::any_of(unique.begin(), unique.end(),
                            [&](const Attribute& a) { return a.name == attr.name; });
    if (seen) {
      ++recovery_events_;
    } else {
      unique.push_back(std::move(attr));
    }
  }

  const std::size_t parent = open_.empty() ? DomTree::kRoot : open_.back();
  const bool is_void = is_void_element(name);
  const bool raw = contains(kRawTextElements, name);
  std::size_t index = tree_.append_child(parent, name, std::move(unique));
  if (is_void || self_closing) return;
  open_.push_back(index);
  if (raw) {
    raw_tag_ = std::move(name);
    raw_scan_ = pos_;
    if (raw_tag_ == "style") style_text_.clear();
  }
}

void HtmlParser::end_tag(std::string_view name) {
  if (is_void_element(name)) {
    ++recovery_events_;
    return;
  }
  std::size_t k = open_.size();
  for (std::size_t i = open_.size(); i-- > 0;) {
    if (tree_.node(open_[i]).tag_name == name) {
      k = i;
      break;
    }
  }
  if (k == open_.size()) {
    ++recovery_events_;
    return;
  }
  recovery_events_ += open_.size() - k - 1;
  close_through(k);
  if (name == "style") style_blocks_.push_back(std::exchange(style_text_, {}));
}

DomTree parse_html(std::string_view source) {
  HtmlParser parser;
  parser.feed(source);
  parser.finish();
  return parser.tree();
}

DomTree parse_html(std::istream& source) {
  std::string bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  if (source.bad()) throw IoError("failed to read HTML stream");
  return parse_html(bytes);
}

namespace {

void escape_attribute(std::string& out, std::string_view value) {
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
}

void serialize_node(const DomTree& tree, std::size_t index, std::string& out) {
  const DomNode& node = tree.node(index);
  out += '<';
  out += node.tag_name;
  for (const auto& attr : node.attributes) {
    out += ' ';
    out += attr.name;
    out += "=\"";
    escape_attribute(out, attr.value);
    out += '"';
  }
  out += '>';
  if (is_void_element(node.tag_name)) return;
  for (std::size_t child : node.children) serialize_node(tree, child, out);
  out += "</";
  out += node.tag_name;
  out += '>';
}

}  // namespace

std::string serialize(const DomTree& tree) {
  std::string out;
  for (std::size_t child : tree.root().children) serialize_node(tree, child, out);
  return out;
}

}  // namespace webcfg::webparse
