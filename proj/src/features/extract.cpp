#include "webcfg/features/extract.hpp"

#include <array>

#include "webcfg/error.hpp"

namespace webcfg::features {

namespace {

struct Shorthand {
  std::string_view name;
  std::span<const std::string_view> longhands;
};

constexpr std::array<std::string_view, 10> kBackground = {
    "background-image", "background-position-x", "background-position-y",
    "background-size", "background-repeat-x", "background-repeat-y",
    "background-attachment", "background-origin", "background-clip", "background-color"};
constexpr std::array<std::string_view, 2> kBackgroundRepeat = {"background-repeat-x",
                                                               "background-repeat-y"};
constexpr std::array<std::string_view, 2> kBackgroundPosition = {"background-position-x",
                                                                 "background-position-y"};
constexpr std::array<std::string_view, 7> kFont = {"font-style", "font-variant", "font-weight",
                                                   "font-stretch", "font-size", "line-height",
                                                   "font-family"};
constexpr std::array<std::string_view, 5> kBorderImage = {
    "border-image-source", "border-image-slice", "border-image-width", "border-image-outset",
    "border-image-repeat"};

constexpr std::array<Shorthand, 5> kShorthands = {{
    {"background", kBackground},
    {"background-repeat", kBackgroundRepeat},
    {"background-position", kBackgroundPosition},
    {"font", kFont},
    {"border-image", kBorderImage},
}};

void bump(RawFeatureMap& raw, std::string_view prefix, std::string_view name) {
  std::string key;
  key.reserve(prefix.size() + name.size());
  key.append(prefix).append(name);
  auto it = raw.find(key);
  if (it == raw.end()) {
    raw.emplace(std::move(key), 1.0);
  } else {
    it->second += 1.0;
  }
}

}  // namespace

double raw_value(const RawFeatureMap& raw, std::string_view key) {
  auto it = raw.find(key);
  return it == raw.end() ? 0.0 : it->second;
}

std::vector<std::string_view> expand_longhands(std::string_view property) {
  for (const auto& sh : kShorthands) {
    if (sh.name == property) return {sh.longhands.begin(), sh.longhands.end()};
  }
  return {property};
}

RawFeatureMap extract_raw_features(const webparse::DomTree& tree,
                                   std::span<const webparse::StyleRule> styles,
                                   std::size_t page_bytes) {
  RawFeatureMap raw;
  auto nodes = tree.nodes();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    bump(raw, "tag:", nodes[i].tag_name);
    for (const auto& attr : nodes[i].attributes) bump(raw, "attr:", attr.name);
  }
  for (const auto& rule : styles) {
    for (const auto& selector : rule.selectors) bump(raw, "selector:", webparse::to_string(selector.kind));
    for (const auto& decl : rule.declarations) {
      for (auto longhand : expand_longhands(decl.property)) bump(raw, "prop:", longhand);
    }
  }
  raw["dom:nodes"] = static_cast<double>(tree.node_count());
  raw["dom:depth"] = static_cast<double>(tree.depth());
  raw["style:rules"] = static_cast<double>(styles.size());
  raw["page:kb"] = static_cast<double>(page_bytes) / 1024.0;
  return raw;
}

RawFeatureMap extract_raw_features(const webparse::ParsedPage& page) {
  return extract_raw_features(page.tree, page.styles, page.total_bytes);
}

FeatureVector project(const RawFeatureMap& raw, const FeatureSchema& schema) {
  if (schema.version() != kSchemaVersion) {
    throw SchemaMismatch("unsupported feature schema " + std::string(schema.version()));
  }
  FeatureVector v;
  v.schema_version = std::string(schema.version());
  auto descriptors = schema.descriptors();
  for (std::size_t i = 0; i < kFeatureCount; ++i) v[i] = raw_value(raw, descriptors[i].raw_key);
  return v;
}

}  // namespace webcfg::features
