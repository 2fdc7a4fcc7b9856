#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace webcfg::webparse {

struct Attribute {
  std::string name;  // lowercase
  std::string value;

  bool operator==(const Attribute&) const = default;
};

/// One element of the tree. Nodes live in a DomTree arena in document
/// order; `parent` and `children` are arena indices.
struct DomNode {
  std::string tag_name;  // lowercase; empty for the synthetic root
  std::vector<Attribute> attributes;
  std::vector<std::size_t> children;
  std::size_t parent = 0;
  std::size_t level = 0;  // 0 for the synthetic root, 1 for top-level elements

  bool operator==(const DomNode&) const = default;
};

/// Element tree rooted at a synthetic document node.
///
/// node_count() counts real elements only, so an empty document has
/// node_count() == 0 and depth() == 0. For any non-empty document depth()
/// is the number of elements on the longest root-to-leaf path.
class DomTree {
 public:
  static constexpr std::size_t kRoot = 0;

  DomTree();

  std::size_t append_child(std::size_t parent, std::string tag_name,
                           std::vector<Attribute> attributes);

  const DomNode& node(std::size_t index) const { return nodes_.at(index); }
  const DomNode& root() const { return nodes_.front(); }
  std::span<const DomNode> nodes() const { return nodes_; }

  std::size_t node_count() const { return nodes_.size() - 1; }
  std::size_t depth() const { return depth_; }

  std::size_t source_bytes() const { return source_bytes_; }
  double source_kb() const { return static_cast<double>(source_bytes_) / 1024.0; }
  void set_source_bytes(std::size_t bytes) { source_bytes_ = bytes; }

  /// Structural equality: tags, attributes and shape. Source size is ignored.
  bool same_structure(const DomTree& other) const { return nodes_ == other.nodes_; }

 private:
  std::vector<DomNode> nodes_;
  std::size_t depth_ = 0;
  std::size_t source_bytes_ = 0;
};

/// Incremental tag-soup parser.
///
/// Bytes may arrive in arbitrary chunks. A token is only acted on once
/// enough input is buffered to make the same decision a one-shot parse
/// would make, so feeding a document in pieces and calling finish() yields
/// exactly the tree that parse_html() yields. Nodes are never removed, so
/// node_count() is non-decreasing across feeds.
class HtmlParser {
 public:
  void feed(std::string_view chunk);
  /// Flushes buffered input and closes every open element.
  void finish();

  const DomTree& tree() const { return tree_; }
  /// Text of each completed `<style>` element, in document order.
  std::span<const std::string> style_blocks() const { return style_blocks_; }
  /// Implicit closes, stray end tags, duplicate attributes and elements
  /// left open at end of input.
  std::size_t recovery_events() const { return recovery_events_; }
  std::size_t bytes_fed() const { return bytes_fed_; }
  bool finished() const { return finished_; }

 private:
  void process();
  bool step();
  bool consume_raw_text();
  bool consume_markup();
  void start_tag(std::string name, std::vector<Attribute> attributes, bool self_closing);
  void end_tag(std::string_view name);
  void close_through(std::size_t stack_pos);
  void auto_close_for(std::string_view name);
  std::size_t find_open(std::string_view name, std::span<const std::string_view> boundaries) const;
  void compact();

  DomTree tree_;
  std::vector<std::size_t> open_;  // stack of open element indices
  std::string buf_;
  std::size_t pos_ = 0;
  std::string raw_tag_;  // non-empty while inside script/style/... content
  std::size_t raw_scan_ = 0;
  std::string style_text_;
  std::vector<std::string> style_blocks_;
  std::size_t recovery_events_ = 0;
  std::size_t bytes_fed_ = 0;
  bool finishing_ = false;
  bool finished_ = false;
};

DomTree parse_html(std::string_view source);
/// Reads the whole stream; throws IoError if the stream is unreadable.
DomTree parse_html(std::istream& source);

/// Markup for the element structure only (no text). Re-parsing the result
/// reproduces the same structure.
std::string serialize(const DomTree& tree);

bool is_void_element(std::string_view tag);

}  // namespace webcfg::webparse
