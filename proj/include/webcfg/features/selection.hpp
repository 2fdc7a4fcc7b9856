#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace webcfg::features {

/// Dense row-major matrix; rows are samples, columns are features.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Pearson coefficients between the columns of `samples`. A zero-variance
/// column correlates 0 with every other column and 1 with itself.
/// Throws ValidationError with fewer than two samples.
Matrix correlation_matrix(const Matrix& samples);

/// Greedy scan over `candidates` (column indices, in order): a candidate is
/// dropped when |r| > threshold against any feature retained before it.
std::vector<std::size_t> prune_correlated(std::span<const std::size_t> candidates,
                                          const Matrix& correlation, double threshold = 0.75);

/// Name-based convenience: `names[i]` labels column i; all columns are
/// candidates in order.
std::vector<std::string> prune_correlated(std::span<const std::string> names,
                                          const Matrix& correlation, double threshold = 0.75);

/// Rank-based equal-frequency binning into at most `max_bins` bins. Equal
/// values always share a bin; with at most `max_bins` distinct values each
/// value gets its own bin.
std::vector<int> equal_frequency_bins(std::span<const double> column, int max_bins = 10);

/// (H(Y) - H(Y|X)) / H(X) over the binned feature, in bits; 0 when the
/// feature has a single bin. Throws ValidationError unless the labels take
/// at least two distinct values.
double information_gain_ratio(std::span<const double> column, std::span<const int> labels,
                              int max_bins = 10);
std::vector<double> information_gain_ratio(const Matrix& samples, std::span<const int> labels,
                                           int max_bins = 10);

}  // namespace webcfg::features
