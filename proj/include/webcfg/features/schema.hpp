#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace webcfg::features {

inline constexpr std::size_t kFeatureCount = 73;
inline constexpr std::string_view kSchemaVersion = "webcfg-features-v1";

enum class FeatureGroup { kTag, kAttribute, kSelector, kStyleProperty, kOther };

struct FeatureDescriptor {
  std::string_view name;     // schema name, e.g. "tag.div" or "background.attachment"
  FeatureGroup group;
  std::string_view raw_key;  // key in the raw feature map, e.g. "tag:div"
};

/// The fixed, versioned 73-feature layout: 24 tag counts, 24 attribute
/// counts, 4 selector kinds, 17 style properties, then DOM depth, DOM node
/// count, style rule count and page size in KB.
class FeatureSchema {
 public:
  static const FeatureSchema& standard();

  /// Same layout under another version tag; only kSchemaVersion can be
  /// populated by project().
  explicit FeatureSchema(std::string version = std::string(kSchemaVersion));

  std::string_view version() const { return version_; }
  std::span<const FeatureDescriptor, kFeatureCount> descriptors() const { return descriptors_; }
  const FeatureDescriptor& operator[](std::size_t i) const { return descriptors_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;

 private:
  std::string version_;
  std::array<FeatureDescriptor, kFeatureCount> descriptors_;
};

/// Values in schema order. Raw vectors hold non-negative counts/sizes,
/// normalized vectors hold values in [0, 1].
struct FeatureVector {
  std::string schema_version{kSchemaVersion};
  std::array<double, kFeatureCount> values{};
  bool normalized = false;

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const FeatureVector&) const = default;
};

/// Positions of the "other" features used by the device model.
namespace index {
std::size_t tag(std::string_view name);
std::size_t dom_depth();
std::size_t dom_nodes();
std::size_t style_rules();
std::size_t page_size_kb();
}  // namespace index

}  // namespace webcfg::features
