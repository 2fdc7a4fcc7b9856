#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "webcfg/features/schema.hpp"
#include "webcfg/webparse/css.hpp"
#include "webcfg/webparse/html.hpp"
#include "webcfg/webparse/snapshot.hpp"

namespace webcfg::features {

/// Every counted quantity of a page, keyed as "tag:<name>", "attr:<name>",
/// "selector:<kind>", "prop:<longhand>", "dom:nodes", "dom:depth",
/// "style:rules" and "page:kb". Absent keys read as zero.
using RawFeatureMap = std::map<std::string, double, std::less<>>;

double raw_value(const RawFeatureMap& raw, std::string_view key);

/// CSS longhands a declared property contributes to. Shorthands expand the
/// way a browser's computed style does (`background`, `background-repeat`,
/// `background-position`, `font`, `border-image`); anything else maps to
/// itself.
std::vector<std::string_view> expand_longhands(std::string_view property);

RawFeatureMap extract_raw_features(const webparse::DomTree& tree,
                                   std::span<const webparse::StyleRule> styles,
                                   std::size_t page_bytes);
RawFeatureMap extract_raw_features(const webparse::ParsedPage& page);

/// Picks the schema features out of a raw map, in schema order.
/// Throws SchemaMismatch for a schema this build cannot populate.
FeatureVector project(const RawFeatureMap& raw,
                      const FeatureSchema& schema = FeatureSchema::standard());

inline FeatureVector extract_features(const webparse::ParsedPage& page) {
  return project(extract_raw_features(page));
}

}  // namespace webcfg::features
