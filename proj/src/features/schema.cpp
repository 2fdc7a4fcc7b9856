#include "webcfg/features/schema.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace webcfg::features {

namespace {

using G = FeatureGroup;

// Raw keys: "tag:", "attr:", "selector:", "prop:" (CSS longhand), and
// "dom:"/"style:"/"page:" for the structural totals.
constexpr std::array<FeatureDescriptor, kFeatureCount> kDescriptors = {{
    {"tag.a", G::kTag, "tag:a"},
    {"tag.b", G::kTag, "tag:b"},
    {"tag.br", G::kTag, "tag:br"},
    {"tag.button", G::kTag, "tag:button"},
    {"tag.div", G::kTag, "tag:div"},
    {"tag.h1", G::kTag, "tag:h1"},
    {"tag.h2", G::kTag, "tag:h2"},
    {"tag.h3", G::kTag, "tag:h3"},
    {"tag.h4", G::kTag, "tag:h4"},
    {"tag.i", G::kTag, "tag:i"},
    {"tag.iframe", G::kTag, "tag:iframe"},
    {"tag.li", G::kTag, "tag:li"},
    {"tag.link", G::kTag, "tag:link"},
    {"tag.meta", G::kTag, "tag:meta"},
    {"tag.nav", G::kTag, "tag:nav"},
    {"tag.img", G::kTag, "tag:img"},
    {"tag.noscript", G::kTag, "tag:noscript"},
    {"tag.p", G::kTag, "tag:p"},
    {"tag.script", G::kTag, "tag:script"},
    {"tag.section", G::kTag, "tag:section"},
    {"tag.span", G::kTag, "tag:span"},
    {"tag.style", G::kTag, "tag:style"},
    {"tag.table", G::kTag, "tag:table"},
    {"tag.tbody", G::kTag, "tag:tbody"},

    {"attr.alt", G::kAttribute, "attr:alt"},
    {"attr.async", G::kAttribute, "attr:async"},
    {"attr.border", G::kAttribute, "attr:border"},
    {"attr.charset", G::kAttribute, "attr:charset"},
    {"attr.class", G::kAttribute, "attr:class"},
    {"attr.height", G::kAttribute, "attr:height"},
    {"attr.content", G::kAttribute, "attr:content"},
    {"attr.href", G::kAttribute, "attr:href"},
    {"attr.media", G::kAttribute, "attr:media"},
    {"attr.method", G::kAttribute, "attr:method"},
    {"attr.onclick", G::kAttribute, "attr:onclick"},
    {"attr.placeholder", G::kAttribute, "attr:placeholder"},
    {"attr.property", G::kAttribute, "attr:property"},
    {"attr.rel", G::kAttribute, "attr:rel"},
    {"attr.role", G::kAttribute, "attr:role"},
    {"attr.style", G::kAttribute, "attr:style"},
    {"attr.target", G::kAttribute, "attr:target"},
    {"attr.type", G::kAttribute, "attr:type"},
    {"attr.value", G::kAttribute, "attr:value"},
    {"attr.background", G::kAttribute, "attr:background"},
    {"attr.cellspacing", G::kAttribute, "attr:cellspacing"},
    {"attr.width", G::kAttribute, "attr:width"},
    {"attr.xmlns", G::kAttribute, "attr:xmlns"},
    {"attr.src", G::kAttribute, "attr:src"},

    {"selector.class", G::kSelector, "selector:class"},
    {"selector.descendant", G::kSelector, "selector:descendant"},
    {"selector.element", G::kSelector, "selector:element"},
    {"selector.id", G::kSelector, "selector:id"},

    {"background.attachment", G::kStyleProperty, "prop:background-attachment"},
    {"background.clip", G::kStyleProperty, "prop:background-clip"},
    {"background.color", G::kStyleProperty, "prop:background-color"},
    {"background.image", G::kStyleProperty, "prop:background-image"},
    {"background.repeat.x", G::kStyleProperty, "prop:background-repeat-x"},
    {"background.repeat.y", G::kStyleProperty, "prop:background-repeat-y"},
    {"background.size", G::kStyleProperty, "prop:background-size"},
    {"background.border.image.repeat", G::kStyleProperty, "prop:border-image-repeat"},
    {"background.border.image.slice", G::kStyleProperty, "prop:border-image-slice"},
    {"background.border.image.source", G::kStyleProperty, "prop:border-image-source"},
    {"background.border.image.width", G::kStyleProperty, "prop:border-image-width"},
    {"font.family", G::kStyleProperty, "prop:font-family"},
    {"font.size", G::kStyleProperty, "prop:font-size"},
    {"font.weight", G::kStyleProperty, "prop:font-weight"},
    {"color", G::kStyleProperty, "prop:color"},
    {"display", G::kStyleProperty, "prop:display"},
    {"float", G::kStyleProperty, "prop:float"},

    {"dom.depth", G::kOther, "dom:depth"},
    {"dom.nodes", G::kOther, "dom:nodes"},
    {"style.rules", G::kOther, "style:rules"},
    {"page.size_kb", G::kOther, "page:kb"},
}};

}  // namespace

FeatureSchema::FeatureSchema(std::string version)
    : version_(std::move(version)), descriptors_(kDescriptors) {}

const FeatureSchema& FeatureSchema::standard() {
  static const FeatureSchema schema;
  return schema;
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  auto it = std::find_if(descriptors_.begin(), descriptors_.end(),
                         [&](const FeatureDescriptor& d) { return d.name == name; });
  if (it == descriptors_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - descriptors_.begin());
}

namespace index {

std::size_t tag(std::string_view name) {
  auto i = FeatureSchema::standard().index_of("tag." + std::string(name));
  if (!i) throw std::out_of_range("tag not in schema: " + std::string(name));
  return *i;
}

std::size_t dom_depth() { return 69; }
std::size_t dom_nodes() { return 70; }
std::size_t style_rules() { return 71; }
std::size_t page_size_kb() { return 72; }

}  // namespace index

}  // namespace webcfg::features
