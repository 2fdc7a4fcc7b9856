#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace webcfg {

/// exp(mean(log x)); every value must be strictly positive.
inline double geometric_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("geometric mean of an empty set");
  double acc = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument("geometric mean needs strictly positive values");
    acc += std::log(v);
  }
  return std::exp(acc / static_cast<double>(values.size()));
}

inline double arithmetic_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty set");
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
inline double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = arithmetic_mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace webcfg
