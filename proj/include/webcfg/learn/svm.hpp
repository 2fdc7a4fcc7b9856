#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace webcfg::learn {

/// exp(-gamma * ||x - y||^2). Throws ValidationError on a length mismatch.
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

double squared_distance(std::span<const double> x, std::span<const double> y);

/// Pairwise squared distances of a point set. Kernel matrices for any gamma
/// are derived from it without touching the points again.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::span<const std::vector<double>> points);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

class KernelMatrix {
 public:
  KernelMatrix(const DistanceMatrix& distances, double gamma);
  KernelMatrix(std::span<const std::vector<double>> points, double gamma);

  std::size_t size() const { return n_; }
  double gamma() const { return gamma_; }
  double operator()(std::size_t i, std::size_t j) const { return k_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  double gamma_ = 0.0;
  std::vector<double> k_;
};

/// Solution of the soft-margin dual for one two-class problem. `alpha` is
/// indexed like the `rows` passed to solve_dual().
struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// SMO with maximal-violating-pair working-set selection. Candidates are
/// scanned in row order and the first maximum wins, so the result is a
/// pure function of the inputs. Stops once the KKT gap drops below `tol`.
/// `labels` are +1/-1 per row. Throws ValidationError when only one class
/// is present.
DualSolution solve_dual(const KernelMatrix& kernel, std::span<const std::size_t> rows,
                        std::span<const int> labels, double C, double tol,
                        std::size_t max_iterations = 0);

struct BinarySvm {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> coefficients;  // label * alpha, within [-C, C]
  double bias = 0.0;
  double gamma = 0.0;
  double C = 0.0;

  double decision(std::span<const double> x) const;
  /// +1 when decision(x) > 0, else -1.
  int predict(std::span<const double> x) const { return decision(x) > 0.0 ? 1 : -1; }

  bool operator==(const BinarySvm&) const = default;
};

struct SmoOptions {
  double C = 1.0;
  double gamma = 1.0;
  double tol = 1e-3;
  std::size_t max_iterations = 0;  // 0 picks a size-dependent cap
};

/// Trains on `points` with +1/-1 `labels`.
BinarySvm smo_train(std::span<const std::vector<double>> points, std::span<const int> labels,
                    const SmoOptions& options);

/// Keeps the rows with alpha > 0 as support vectors.
BinarySvm make_machine(std::span<const std::vector<double>> points, std::span<const std::size_t> rows,
                       std::span<const int> labels, const DualSolution& solution, double C,
                       double gamma);

/// Largest violation of the KKT margin conditions over a training set:
/// alpha = 0 needs y*f >= 1, 0 < alpha < C needs y*f = 1, alpha = C needs
/// y*f <= 1. `alpha[i]` belongs to points[i].
double max_kkt_violation(const BinarySvm& machine, std::span<const std::vector<double>> points,
                         std::span<const int> labels, std::span<const double> alpha);

}  // namespace webcfg::learn
