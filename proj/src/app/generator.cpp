#include "webcfg/app/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string_view>
#include <vector>

#include "webcfg/error.hpp"

namespace webcfg::app {

namespace fs = std::filesystem;

namespace {

// Portable draws on top of mt19937_64, whose output sequence is fixed by
// the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
  }
  bool chance(double p) { return uniform() < p; }
  double exponential() { return -std::log1p(-uniform()); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  std::size_t pick(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (x < weights[i]) return i;
      x -= weights[i];
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Kind { kFlow, kBlockPhrasing, kPhrasing, kVoid, kRaw, kHead, kList, kTable, kStructural };

struct TagSpec {
  std::string_view name;
  Kind kind;
};

// Tags the body mix is drawn over.
constexpr std::array<TagSpec, 24> kBodyTags = {{
    {"a", Kind::kPhrasing},       {"b", Kind::kPhrasing},      {"br", Kind::kVoid},
    {"button", Kind::kPhrasing},  {"div", Kind::kFlow},        {"h1", Kind::kBlockPhrasing},
    {"h2", Kind::kBlockPhrasing}, {"h3", Kind::kBlockPhrasing}, {"h4", Kind::kBlockPhrasing},
    {"i", Kind::kPhrasing},       {"iframe", Kind::kRaw},      {"li", Kind::kList},
    {"meta", Kind::kHead},        {"nav", Kind::kFlow},        {"img", Kind::kVoid},
    {"noscript", Kind::kRaw},     {"p", Kind::kBlockPhrasing}, {"script", Kind::kRaw},
    {"section", Kind::kFlow},     {"span", Kind::kPhrasing},   {"style", Kind::kHead},
    {"table", Kind::kTable},      {"form", Kind::kFlow},       {"input", Kind::kVoid},
}};

constexpr std::string_view kWords[] = {
    "lorem", "ipsum", "dolor", "sit", "amet", "news", "sport", "video", "search", "login",
    "market", "today", "weather", "travel", "music", "photo", "story", "update", "world", "local"};

struct Node {
  std::string tag;
  std::size_t parent = 0;
  std::size_t level = 0;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::size_t> children;
  std::string text;
  bool text_capable = false;
};

class PageBuilder {
 public:
  PageBuilder(Rng& rng, const PagePlan& plan) : rng_(rng), plan_(plan) {
    for (double& w : tag_weights_) w = rng_.exponential();
    for (double& p : attr_rate_) p = rng_.uniform() * rng_.uniform();
  }

  webparse::PageSource build() {
    html_ = add(0, "html", false);
    nodes_[html_].level = 1;
    if (attr_on(kXmlns)) attr(html_, "xmlns", "http://www.w3.org/1999/xhtml");
    head_ = add(html_, "head", false);
    body_ = add(html_, "body", true);
    if (attr_on(kBackground)) attr(body_, "background", "bg.png");
    const auto link = add(head_, "link", false);
    attr(link, "rel", "stylesheet");
    attr(link, "href", "style.css");
    if (attr_on(kType)) attr(link, "type", "text/css");
    if (attr_on(kMedia)) attr(link, "media", "screen");
    flow_.push_back(body_);

    // A chain of containers reaching the planned depth.
    std::size_t parent = body_;
    while (remaining() > 0 && nodes_[parent].level < plan_.depth) {
      static constexpr std::string_view chain[] = {"div", "section", "nav"};
      parent = add_element(parent, std::string(chain[rng_.below(3)]));
    }
    while (remaining() > 0) place_one();

    build_styles();
    distribute_text();

    webparse::PageSource page;
    page.html = "<!DOCTYPE html>\n";
    write(html_, page.html);
    page.html += '\n';
    page.stylesheets.push_back(std::move(external_css_));
    return page;
  }

 private:
  enum Attr {
    kAlt, kAsync, kBorder, kCharset, kClass, kHeight, kContent, kHref, kMedia, kMethod, kOnclick,
    kPlaceholder, kProperty, kRel, kRole, kStyle, kTarget, kType, kValue, kBackground, kCellspacing,
    kWidth, kXmlns, kSrc, kAttrCount
  };

  std::size_t remaining() const { return nodes_.size() >= plan_.nodes + 1 ? 0 : plan_.nodes + 1 - nodes_.size(); }
  bool attr_on(Attr a) { return rng_.chance(attr_rate_[a]); }
  void attr(std::size_t node, std::string name, std::string value) {
    nodes_[node].attributes.emplace_back(std::move(name), std::move(value));
  }

  std::size_t add(std::size_t parent, std::string tag, bool text_capable) {
    Node n;
    n.tag = std::move(tag);
    n.parent = parent;
    n.level = nodes_.empty() ? 0 : nodes_[parent].level + 1;
    n.text_capable = text_capable;
    nodes_.push_back(std::move(n));
    const std::size_t id = nodes_.size() - 1;
    if (id != 0) nodes_[parent].children.push_back(id);
    return id;
  }

  // Adds a body element with generic attributes and registers it as a
  // container when it can hold children.
  std::size_t add_element(std::size_t parent, std::string tag) {
    const bool flow = tag == "div" || tag == "section" || tag == "nav" || tag == "form" ||
                      tag == "li" || tag == "td";
    const bool block_phrasing = tag == "p" || (tag.size() == 2 && tag[0] == 'h' && tag != "hr");
    const bool phrasing = tag == "span" || tag == "a" || tag == "b" || tag == "i" || tag == "button";
    const auto id = add(parent, tag, flow || block_phrasing || phrasing);
    if (flow && nodes_[id].level < plan_.depth) flow_.push_back(id);
    if ((block_phrasing || phrasing) && nodes_[id].level < plan_.depth) phrasing_.push_back(id);

    if (attr_on(kClass)) attr(id, "class", "c" + std::to_string(rng_.below(40)));
    if (attr_on(kStyle)) attr(id, "style", "color:#333");
    if ((flow || tag == "button") && attr_on(kRole)) attr(id, "role", "region");
    if ((tag == "button" || tag == "div" || tag == "a" || tag == "span") && attr_on(kOnclick)) {
      attr(id, "onclick", "go()");
    }
    if (tag == "a") {
      attr(id, "href", "/p" + std::to_string(rng_.below(1000)) + ".html");
      if (attr_on(kTarget)) attr(id, "target", "_blank");
      if (attr_on(kRel)) attr(id, "rel", "nofollow");
    } else if (tag == "button") {
      if (attr_on(kType)) attr(id, "type", "submit");
      if (attr_on(kValue)) attr(id, "value", "ok");
    } else if (tag == "form") {
      if (attr_on(kMethod)) attr(id, "method", "post");
    } else if (tag == "td") {
      if (attr_on(kBackground)) attr(id, "background", "cell.png");
    }
    return id;
  }

  std::size_t pick_parent(bool needs_flow, std::size_t max_parent_level) {
    std::vector<std::size_t> candidates;
    for (auto id : flow_) {
      if (nodes_[id].level <= max_parent_level) candidates.push_back(id);
    }
    if (!needs_flow) {
      for (auto id : phrasing_) {
        if (nodes_[id].level <= max_parent_level) candidates.push_back(id);
      }
    }
    if (candidates.empty()) return body_;
    return candidates[rng_.below(candidates.size())];
  }

  void place_one() {
    const std::vector<double> weights(tag_weights_.begin(), tag_weights_.end());
    const auto& spec = kBodyTags[rng_.pick(weights)];
    const std::string tag(spec.name);
    const std::size_t cap = plan_.depth - 1;  // deepest level a parent may sit at
    switch (spec.kind) {
      case Kind::kFlow:
      case Kind::kBlockPhrasing:
        add_element(pick_parent(true, cap), tag);
        break;
      case Kind::kPhrasing:
        add_element(pick_parent(false, cap), tag);
        break;
      case Kind::kVoid: {
        const auto id = add(pick_parent(false, cap), tag, false);
        if (tag == "img") {
          attr(id, "src", "img" + std::to_string(rng_.below(500)) + ".jpg");
          if (attr_on(kAlt)) attr(id, "alt", "photo");
          if (attr_on(kWidth)) attr(id, "width", "120");
          if (attr_on(kHeight)) attr(id, "height", "80");
        } else if (tag == "input") {
          if (attr_on(kType)) attr(id, "type", "text");
          if (attr_on(kPlaceholder)) attr(id, "placeholder", "search");
          if (attr_on(kValue)) attr(id, "value", "");
        }
        if (attr_on(kClass)) attr(id, "class", "c" + std::to_string(rng_.below(40)));
        break;
      }
      case Kind::kRaw: {
        const bool in_head = tag == "script" && rng_.chance(0.5);
        const auto id = add(in_head ? head_ : pick_parent(true, cap), tag, false);
        if (tag == "script") {
          if (rng_.chance(0.5)) {
            attr(id, "src", "js/app" + std::to_string(rng_.below(50)) + ".js");
            if (attr_on(kAsync)) attr(id, "async", "");
          } else {
            nodes_[id].text = "var v" + std::to_string(id) + " = " + std::to_string(rng_.below(100)) + ";";
          }
          if (attr_on(kType)) attr(id, "type", "text/javascript");
        } else if (tag == "iframe") {
          attr(id, "src", "/frame" + std::to_string(rng_.below(20)) + ".html");
          if (attr_on(kWidth)) attr(id, "width", "300");
          if (attr_on(kHeight)) attr(id, "height", "250");
          if (attr_on(kBorder)) attr(id, "border", "0");
        } else {
          nodes_[id].text = "enable scripts";
        }
        break;
      }
      case Kind::kHead: {
        const auto id = add(head_, tag, false);
        if (tag == "meta") {
          if (!charset_done_) {
            attr(id, "charset", "utf-8");
            charset_done_ = true;
          } else {
            attr(id, "property", "og:item" + std::to_string(rng_.below(10)));
            attr(id, "content", "value" + std::to_string(rng_.below(100)));
          }
        } else {
          style_nodes_.push_back(id);
          if (attr_on(kType)) attr(id, "type", "text/css");
          if (attr_on(kMedia)) attr(id, "media", "all");
        }
        break;
      }
      case Kind::kList: {
        std::vector<std::size_t> lists;
        for (auto id : lists_) {
          if (nodes_[id].level <= cap) lists.push_back(id);
        }
        if (!lists.empty() && (remaining() < 2 || rng_.chance(0.7))) {
          add_element(lists[rng_.below(lists.size())], "li");
        } else if (remaining() >= 2) {
          const auto ul = add(pick_parent(true, cap > 0 ? cap - 1 : 0), "ul", false);
          lists_.push_back(ul);
          add_element(ul, "li");
        } else {
          add_element(pick_parent(false, cap), "span");
        }
        break;
      }
      case Kind::kTable: {
        if (remaining() < 4 || cap < 5) {
          add_element(pick_parent(false, cap), "span");
          break;
        }
        const auto table = add(pick_parent(true, cap - 3), "table", false);
        if (attr_on(kBorder)) attr(table, "border", "1");
        if (attr_on(kCellspacing)) attr(table, "cellspacing", "0");
        if (attr_on(kWidth)) attr(table, "width", "100%");
        if (attr_on(kBackground)) attr(table, "background", "grid.png");
        const auto tbody = add(table, "tbody", false);
        const auto tr = add(tbody, "tr", false);
        add_element(tr, "td");
        break;
      }
      case Kind::kStructural:
        break;
    }
  }

  std::string selector() {
    static constexpr std::string_view elements[] = {"div", "p", "a", "span", "li", "h2", "nav", "img"};
    switch (rng_.pick(selector_weights_)) {
      case 0: return ".c" + std::to_string(rng_.below(40));
      case 1: return "#x" + std::to_string(rng_.below(60));
      case 2: return std::string(elements[rng_.below(8)]);
      default:
        return std::string(elements[rng_.below(8)]) + (rng_.chance(0.3) ? " > " : " ") +
               std::string(elements[rng_.below(8)]);
    }
  }

  std::string declaration() {
    static constexpr std::string_view decls[] = {
        "background: #fff url(bg.png) no-repeat",
        "background-attachment: fixed",
        "background-clip: padding-box",
        "background-color: #eee",
        "background-image: url(tile.png)",
        "background-repeat: repeat-x",
        "background-size: cover",
        "background-position: 0 0",
        "border-image: url(frame.png) 30 round",
        "border-image-repeat: stretch",
        "border-image-slice: 10",
        "border-image-source: url(edge.png)",
        "border-image-width: 2px",
        "font: bold 12px/1.4 Arial, sans-serif",
        "font-family: Georgia, serif",
        "font-size: 14px",
        "font-weight: 700",
        "color: #222",
        "display: block",
        "float: left",
        "margin: 0 auto",
        "padding: 4px",
        "width: 50%",
    };
    constexpr std::size_t count = sizeof(decls) / sizeof(decls[0]);
    if (decl_weights_.empty()) {
      for (std::size_t i = 0; i < count; ++i) decl_weights_.push_back(rng_.exponential());
    }
    return std::string(decls[rng_.pick(decl_weights_)]);
  }

  std::string rule() {
    std::string out = selector();
    if (rng_.chance(0.25)) out += ", " + selector();
    out += " {";
    const std::size_t n = 1 + rng_.below(5);
    for (std::size_t i = 0; i < n; ++i) {
      out += ' ';
      out += declaration();
      out += ';';
    }
    out += " }\n";
    return out;
  }

  void build_styles() {
    for (double& w : selector_weights_) w = rng_.exponential();
    std::size_t inline_rules = 0;
    if (!style_nodes_.empty()) {
      inline_rules = static_cast<std::size_t>(std::floor(plan_.rules * rng_.uniform(0.0, 0.3)));
    }
    for (std::size_t i = 0; i < inline_rules; ++i) {
      nodes_[style_nodes_[i % style_nodes_.size()]].text += rule();
    }
    const std::size_t external = plan_.rules - inline_rules;
    const std::size_t in_media = rng_.chance(0.5) ? external / 10 : 0;
    external_css_ = "/* site styles */\n";
    for (std::size_t i = in_media; i < external; ++i) external_css_ += rule();
    if (in_media > 0) {
      external_css_ += "@media screen and (max-width: 600px) {\n";
      for (std::size_t i = 0; i < in_media; ++i) external_css_ += "  " + rule();
      external_css_ += "}\n";
    }
  }

  std::size_t markup_bytes() {
    std::string probe;
    write(html_, probe);
    return probe.size();
  }

  void distribute_text() {
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].text_capable) slots.push_back(i);
    }
    const double target = plan_.target_kb * 1024.0;
    const double used = static_cast<double>(markup_bytes() + external_css_.size() + 17);
    if (slots.empty() || used >= target) return;
    const auto budget = static_cast<std::size_t>(target - used);
    std::vector<double> w(slots.size());
    double total = 0.0;
    for (double& x : w) total += (x = rng_.exponential());
    std::size_t given = 0;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const auto share = k + 1 == slots.size()
                             ? budget - given
                             : std::min(budget - given, static_cast<std::size_t>(budget * w[k] / total));
      nodes_[slots[k]].text = words(share);
      given += share;
    }
  }

  std::string words(std::size_t bytes) {
    std::string out;
    out.reserve(bytes);
    while (out.size() < bytes) {
      if (!out.empty()) out += ' ';
      out += kWords[rng_.below(std::size(kWords))];
    }
    out.resize(bytes);
    return out;
  }

  void write(std::size_t id, std::string& out) const {
    const auto& n = nodes_[id];
    out += '<';
    out += n.tag;
    for (const auto& [name, value] : n.attributes) {
      out += ' ';
      out += name;
      out += "=\"";
      out += value;
      out += '"';
    }
    out += '>';
    if (webparse::is_void_element(n.tag)) return;
    out += n.text;
    for (auto child : n.children) write(child, out);
    out += "</";
    out += n.tag;
    out += '>';
  }

  Rng& rng_;
  PagePlan plan_;
  std::vector<Node> nodes_{Node{}};  // index 0 is a placeholder parent for <html>
  std::size_t html_ = 0;
  std::size_t head_ = 0;
  std::size_t body_ = 0;
  std::vector<std::size_t> flow_;
  std::vector<std::size_t> phrasing_;
  std::vector<std::size_t> lists_;
  std::vector<std::size_t> style_nodes_;
  bool charset_done_ = false;
  std::array<double, kBodyTags.size()> tag_weights_{};
  std::array<double, kAttrCount> attr_rate_{};
  std::vector<double> selector_weights_ = std::vector<double>(4, 1.0);
  std::vector<double> decl_weights_;
  std::string external_css_;
};

}  // namespace

void SizeProfile::validate() const {
  if (min_nodes < 4 || min_nodes > max_nodes) throw ValidationError("node range must satisfy 4 <= min <= max");
  if (!(min_kb > 0.0) || min_kb > max_kb) throw ValidationError("size range must satisfy 0 < min <= max");
}

std::string page_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "page-%04zu", index);
  return buf;
}

webparse::PageSource generate_page(std::uint64_t seed, std::size_t index, const SizeProfile& profile,
                                   PagePlan* plan_out) {
  profile.validate();
  Rng rng(splitmix(seed ^ splitmix(index + 1)));
  PagePlan plan;
  plan.nodes = static_cast<std::size_t>(
      std::llround(rng.log_uniform(static_cast<double>(profile.min_nodes),
                                   static_cast<double>(profile.max_nodes))));
  plan.nodes = std::clamp(plan.nodes, profile.min_nodes, profile.max_nodes);
  plan.target_kb = rng.log_uniform(profile.min_kb, profile.max_kb);
  plan.rules = static_cast<std::size_t>(std::floor(plan.target_kb * rng.uniform(0.05, 0.4)));
  const double depth = 2.0 + std::log2(static_cast<double>(plan.nodes)) * rng.uniform(0.8, 1.6);
  plan.depth = std::max<std::size_t>(3, static_cast<std::size_t>(std::floor(depth)));
  if (plan_out) *plan_out = plan;
  PageBuilder builder(rng, plan);
  return builder.build();
}

CorpusManifest gen_corpus(const fs::path& root, std::size_t n, std::uint64_t seed,
                          const SizeProfile& profile) {
  if (n == 0) throw ValidationError("corpus size must be at least 1");
  profile.validate();
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());

  CorpusManifest manifest;
  manifest.root = root;
  manifest.seed = seed;
  manifest.pages.resize(n);
  learn::parallel_for(n, [&](std::size_t i) {
    const auto page = generate_page(seed, i, profile);
    const auto id = page_id(i);
    const auto dir = root / id;
    std::error_code mk;
    fs::create_directories(dir, mk);
    if (mk) throw IoError("cannot create " + dir.string() + ": " + mk.message());
    auto write_file = [](const fs::path& path, const std::string& bytes) {
      std::ofstream out(path, std::ios::binary);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw IoError("cannot write " + path.string());
    };
    write_file(dir / "index.html", page.html);
    write_file(dir / "style.css", page.stylesheets.front());
    manifest.pages[i] = {id, fs::path(id), page.total_bytes()};
  });
  write_manifest(manifest);
  return manifest;
}

}  // namespace webcfg::app
