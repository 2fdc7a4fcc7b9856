#include "webcfg/learn/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "webcfg/error.hpp"

namespace webcfg::learn {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

double squared_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("kernel arguments differ in dimension");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  return std::exp(-gamma * squared_distance(x, y));
}

DistanceMatrix::DistanceMatrix(std::span<const std::vector<double>> points)
    : n_(points.size()), d_(points.size() * points.size(), 0.0) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      d_[i * n_ + j] = d_[j * n_ + i] = squared_distance(points[i], points[j]);
    }
  }
}

KernelMatrix::KernelMatrix(const DistanceMatrix& distances, double gamma)
    : n_(distances.size()), gamma_(gamma), k_(n_ * n_) {
  for (std::size_t i = 0; i < n_; ++i) {
    k_[i * n_ + i] = 1.0;
    for (std::size_t j = i + 1; j < n_; ++j) {
      k_[i * n_ + j] = k_[j * n_ + i] = std::exp(-gamma * distances(i, j));
    }
  }
}

KernelMatrix::KernelMatrix(std::span<const std::vector<double>> points, double gamma)
    : KernelMatrix(DistanceMatrix(points), gamma) {}

DualSolution solve_dual(const KernelMatrix& kernel, std::span<const std::size_t> rows,
                        std::span<const int> labels, double C, double tol,
                        std::size_t max_iterations) {
  const std::size_t n = rows.size();
  if (labels.size() != n) throw ValidationError("one label per training row required");
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
  if (!has_pos || !has_neg) throw ValidationError("binary SVM training needs both classes");
  if (!(C > 0.0)) throw ValidationError("C must be positive");
  if (max_iterations == 0) max_iterations = std::max<std::size_t>(1000000, 100 * n);

  auto K = [&](std::size_t a, std::size_t b) { return kernel(rows[a], rows[b]); };
  auto y = [&](std::size_t a) { return static_cast<double>(labels[a]); };

  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);  // Q*alpha - e

  auto upper = [&](std::size_t t) { return sol.alpha[t] >= C; };
  auto lower = [&](std::size_t t) { return sol.alpha[t] <= 0.0; };

  while (sol.iterations < max_iterations) {
    // Maximal violating pair.
    double gmax_up = -std::numeric_limits<double>::infinity();
    double gmax_low = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double ygrad = y(t) * grad[t];
      const bool in_up = labels[t] == 1 ? !upper(t) : !lower(t);
      const bool in_low = labels[t] == 1 ? !lower(t) : !upper(t);
      if (in_up && -ygrad > gmax_up) {
        gmax_up = -ygrad;
        i = t;
      }
      if (in_low && ygrad > gmax_low) {
        gmax_low = ygrad;
        j = t;
      }
    }
    if (i == n || j == n || gmax_up + gmax_low < tol) {
      sol.converged = true;
      break;
    }
    ++sol.iterations;

    const double old_ai = sol.alpha[i];
    const double old_aj = sol.alpha[j];
    const double qij = y(i) * y(j) * K(i, j);
    double& ai = sol.alpha[i];
    double& aj = sol.alpha[j];
    if (labels[i] != labels[j]) {
      double quad = K(i, i) + K(j, j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > C) {
          ai = C;
          aj = C - diff;
        }
      } else if (aj > C) {
        aj = C;
        ai = C + diff;
      }
    } else {
      double quad = K(i, i) + K(j, j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) {
          ai = C;
          aj = sum - C;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > C) {
        if (aj > C) {
          aj = C;
          ai = sum - C;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }

    const double dai = ai - old_ai;
    const double daj = aj - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y(t) * (y(i) * K(i, t) * dai + y(j) * K(j, t) * daj);
    }
  }

  // Bias from the free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double ygrad = y(t) * grad[t];
    if (upper(t)) {
      if (labels[t] == -1) ub = std::min(ub, ygrad);
      else lb = std::max(lb, ygrad);
    } else if (lower(t)) {
      if (labels[t] == 1) ub = std::min(ub, ygrad);
      else lb = std::max(lb, ygrad);
    } else {
      ++free_count;
      free_sum += ygrad;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;
  sol.bias = -rho;
  return sol;
}

double BinarySvm::decision(std::span<const double> x) const {
  double acc = bias;
  for (std::size_t s = 0; s < support_vectors.size(); ++s) {
    acc += coefficients[s] * rbf_kernel(support_vectors[s], x, gamma);
  }
  return acc;
}

BinarySvm make_machine(std::span<const std::vector<double>> points, std::span<const std::size_t> rows,
                       std::span<const int> labels, const DualSolution& solution, double C,
                       double gamma) {
  BinarySvm machine;
  machine.bias = solution.bias;
  machine.gamma = gamma;
  machine.C = C;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (solution.alpha[t] > 0.0) {
      machine.support_vectors.push_back(points[rows[t]]);
      machine.coefficients.push_back(labels[t] * solution.alpha[t]);
    }
  }
  return machine;
}

BinarySvm smo_train(std::span<const std::vector<double>> points, std::span<const int> labels,
                    const SmoOptions& options) {
  if (points.size() != labels.size()) throw ValidationError("one label per point required");
  KernelMatrix kernel(points, options.gamma);
  std::vector<std::size_t> rows(points.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  auto solution = solve_dual(kernel, rows, labels, options.C, options.tol, options.max_iterations);
  return make_machine(points, rows, labels, solution, options.C, options.gamma);
}

double max_kkt_violation(const BinarySvm& machine, std::span<const std::vector<double>> points,
                         std::span<const int> labels, std::span<const double> alpha) {
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double margin = labels[i] * machine.decision(points[i]);
    double violation = 0.0;
    if (alpha[i] <= 0.0) {
      violation = std::max(0.0, 1.0 - margin);
    } else if (alpha[i] >= machine.C) {
      violation = std::max(0.0, margin - 1.0);
    } else {
      violation = std::abs(margin - 1.0);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

}  // namespace webcfg::learn
