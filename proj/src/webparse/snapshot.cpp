#include "webcfg/webparse/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>

#include "webcfg/error.hpp"

namespace webcfg::webparse {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("failed reading " + path.string());
  return bytes;
}

}  // namespace

std::size_t PageSource::total_bytes() const {
  return std::accumulate(stylesheets.begin(), stylesheets.end(), html.size(),
                         [](std::size_t acc, const std::string& s) { return acc + s.size(); });
}

PageSource load_page_source(const std::filesystem::path& dir) {
  PageSource page;
  const auto index = dir / "index.html";
  if (!std::filesystem::is_regular_file(index)) {
    throw IoError("page directory has no index.html: " + dir.string());
  }
  page.html = read_file(index);
  std::vector<std::filesystem::path> sheets;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".css") sheets.push_back(entry.path());
  }
  std::sort(sheets.begin(), sheets.end());
  for (const auto& sheet : sheets) page.stylesheets.push_back(read_file(sheet));
  return page;
}

PageStream::PageStream(const PageSource& source, std::size_t chunk_size)
    : source_(source), chunk_size_(chunk_size), total_(source.total_bytes()),
      sheets_(source.stylesheets.size()), segment_finished_(1 + source.stylesheets.size(), false) {
  if (chunk_size_ == 0) throw ValidationError("chunk size must be at least 1 byte");
}

bool PageStream::advance() {
  if (exhausted_) return false;
  std::size_t budget = chunk_size_;
  std::size_t begin = 0;
  const std::size_t segments = 1 + sheets_.size();
  for (std::size_t seg = 0; seg < segments; ++seg) {
    std::string_view bytes = seg == 0 ? std::string_view(source_.html)
                                      : std::string_view(source_.stylesheets[seg - 1]);
    const std::size_t end = begin + bytes.size();
    if (budget > 0 && consumed_ >= begin && consumed_ < end) {
      const std::size_t take = std::min(budget, end - consumed_);
      auto piece = bytes.substr(consumed_ - begin, take);
      if (seg == 0) html_.feed(piece);
      else sheets_[seg - 1].feed(piece);
      consumed_ += take;
      budget -= take;
    }
    if (consumed_ >= end && !segment_finished_[seg]) {
      if (seg == 0) html_.finish();
      else sheets_[seg - 1].finish();
      segment_finished_[seg] = true;
    }
    begin = end;
  }
  refresh_styles();
  exhausted_ = consumed_ >= total_;
  return true;
}

void PageStream::refresh_styles() {
  auto blocks = html_.style_blocks();
  for (; inline_blocks_seen_ < blocks.size(); ++inline_blocks_seen_) {
    auto rules = parse_css(blocks[inline_blocks_seen_]);
    inline_rules_.insert(inline_rules_.end(), rules.begin(), rules.end());
  }
  styles_ = inline_rules_;
  for (const auto& sheet : sheets_) {
    auto rules = sheet.rules();
    styles_.insert(styles_.end(), rules.begin(), rules.end());
  }
}

DomSnapshot PageStream::snapshot() const { return DomSnapshot{tree(), styles_, consumed_}; }

std::vector<DomSnapshot> snapshot_stream(const PageSource& source, std::size_t chunk_size) {
  PageStream stream(source, chunk_size);
  std::vector<DomSnapshot> out;
  while (stream.advance()) out.push_back(stream.snapshot());
  return out;
}

ParsedPage parse_page(const PageSource& source) {
  PageStream stream(source, std::numeric_limits<std::size_t>::max());
  stream.advance();
  return ParsedPage{stream.tree(), stream.styles(), source.total_bytes(), stream.recovery_events()};
}

}  // namespace webcfg::webparse
