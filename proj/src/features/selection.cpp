#include "webcfg/features/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "webcfg/error.hpp"

namespace webcfg::features {

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix correlation_matrix(const Matrix& samples) {
  const std::size_t n = samples.rows();
  const std::size_t d = samples.cols();
  if (n < 2) throw ValidationError("correlation needs at least two samples");

  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) mean[c] += samples(r, c);
  }
  for (auto& m : mean) m /= static_cast<double>(n);

  Matrix centered(n, d);
  std::vector<double> norm(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double x = samples(r, c) - mean[c];
      centered(r, c) = x;
      norm[c] += x * x;
    }
  }
  for (auto& v : norm) v = std::sqrt(v);

  Matrix corr(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    corr(a, a) = 1.0;
    for (std::size_t b = a + 1; b < d; ++b) {
      double r = 0.0;
      if (norm[a] > 0.0 && norm[b] > 0.0) {
        double dot = 0.0;
        for (std::size_t s = 0; s < n; ++s) dot += centered(s, a) * centered(s, b);
        r = std::clamp(dot / (norm[a] * norm[b]), -1.0, 1.0);
      }
      corr(a, b) = corr(b, a) = r;
    }
  }
  return corr;
}

std::vector<std::size_t> prune_correlated(std::span<const std::size_t> candidates,
                                          const Matrix& correlation, double threshold) {
  std::vector<std::size_t> retained;
  for (std::size_t candidate : candidates) {
    bool redundant = std::any_of(retained.begin(), retained.end(), [&](std::size_t kept) {
      return std::abs(correlation(candidate, kept)) > threshold;
    });
    if (!redundant) retained.push_back(candidate);
  }
  return retained;
}

std::vector<std::string> prune_correlated(std::span<const std::string> names,
                                          const Matrix& correlation, double threshold) {
  if (names.size() != correlation.cols()) {
    throw ValidationError("feature names do not match correlation matrix size");
  }
  std::vector<std::size_t> all(names.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::string> out;
  for (std::size_t i : prune_correlated(all, correlation, threshold)) out.push_back(names[i]);
  return out;
}

std::vector<int> equal_frequency_bins(std::span<const double> column, int max_bins) {
  const std::size_t n = column.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });

  std::size_t distinct = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (p == 0 || column[order[p]] != column[order[p - 1]]) ++distinct;
  }

  std::vector<int> bins(n, 0);
  int bin = -1;
  int distinct_rank = -1;
  for (std::size_t p = 0; p < n; ++p) {
    const bool new_value = p == 0 || column[order[p]] != column[order[p - 1]];
    if (new_value) {
      ++distinct_rank;
      bin = distinct <= static_cast<std::size_t>(max_bins)
                ? distinct_rank
                : static_cast<int>((p * static_cast<std::size_t>(max_bins)) / n);
    }
    bins[order[p]] = bin;
  }
  return bins;
}

namespace {

template <typename Key>
double entropy_bits(const std::map<Key, std::size_t>& counts, std::size_t total) {
  double h = 0.0;
  for (const auto& [key, count] : counts) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

void require_two_labels(std::span<const int> labels) {
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw ValidationError("information gain ratio needs at least two labels");
}

double igr_unchecked(std::span<const double> column, std::span<const int> labels, int max_bins) {
  const std::size_t n = labels.size();
  auto bins = equal_frequency_bins(column, max_bins);

  std::map<int, std::size_t> label_counts;
  std::map<int, std::size_t> bin_counts;
  std::map<int, std::map<int, std::size_t>> joint;
  for (std::size_t i = 0; i < n; ++i) {
    ++label_counts[labels[i]];
    ++bin_counts[bins[i]];
    ++joint[bins[i]][labels[i]];
  }
  const double split = entropy_bits(bin_counts, n);
  if (split <= 0.0) return 0.0;
  double conditional = 0.0;
  for (const auto& [b, per_label] : joint) {
    const std::size_t nb = bin_counts[b];
    conditional += static_cast<double>(nb) / static_cast<double>(n) * entropy_bits(per_label, nb);
  }
  const double gain = entropy_bits(label_counts, n) - conditional;
  return std::max(0.0, gain) / split;
}

}  // namespace

double information_gain_ratio(std::span<const double> column, std::span<const int> labels,
                              int max_bins) {
  if (column.size() != labels.size()) throw ValidationError("feature and label lengths differ");
  require_two_labels(labels);
  return igr_unchecked(column, labels, max_bins);
}

std::vector<double> information_gain_ratio(const Matrix& samples, std::span<const int> labels,
                                           int max_bins) {
  if (samples.rows() != labels.size()) throw ValidationError("sample and label counts differ");
  require_two_labels(labels);
  std::vector<double> out(samples.cols());
  for (std::size_t c = 0; c < samples.cols(); ++c) {
    auto col = samples.column(c);
    out[c] = igr_unchecked(col, labels, max_bins);
  }
  return out;
}

}  // namespace webcfg::features
