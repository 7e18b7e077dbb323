#pragma once

// Exact discrete optimal transport on finite metric spaces.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qdist/types.hpp"

namespace qdist {

/// Finite point set with a dense, symmetric, bounded distance matrix.
///
/// The matrix is shared between copies; a MetricSpace is immutable once built.
class MetricSpace {
 public:
  MetricSpace() = default;

  /// Validates zero diagonal, symmetry (to 1e-12 relative), non-negativity
  /// and finiteness. Throws std::invalid_argument otherwise.
  static MetricSpace from_matrix(Matrix dist);

  std::size_t size() const { return dist_ ? static_cast<std::size_t>(dist_->rows()) : 0; }
  double operator()(std::size_t i, std::size_t j) const { return (*dist_)(i, j); }
  const Matrix& matrix() const { return *dist_; }

  /// Largest pairwise distance.
  double diameter() const;

  /// Same points with every distance multiplied by `factor` (> 0).
  MetricSpace scaled(double factor) const;

 private:
  explicit MetricSpace(std::shared_ptr<const Matrix> dist) : dist_(std::move(dist)) {}
  std::shared_ptr<const Matrix> dist_;
};

/// Probability weights over the points of a MetricSpace.
class Distribution {
 public:
  static constexpr double kNormTolerance = 1e-9;

  Distribution() = default;

  /// Requires every weight >= 0 and the total within kNormTolerance of 1.
  static Distribution from_weights(std::vector<double> weights);
  /// Rescales non-negative weights with a positive total to sum to one.
  static Distribution normalized(std::vector<double> weights);
  static Distribution uniform(std::size_t n);
  static Distribution point_mass(std::size_t n, std::size_t at);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }

 private:
  explicit Distribution(std::vector<double> w) : weights_(std::move(w)) {}
  std::vector<double> weights_;
};

/// Order of the Wasserstein distance (lambda >= 1).
struct DistanceConfig {
  int order = 1;

  void validate() const;
};

struct TransportEntry {
  std::size_t source;
  std::size_t target;
  double mass;
};

/// Sparse optimal coupling. Only non-zero entries are stored; `cost` is the
/// transport objective sum P_ij d_ij^order (not its order-th root).
struct TransportPlan {
  std::size_t size = 0;
  std::vector<TransportEntry> entries;
  double cost = 0.0;

  Matrix dense() const;
  std::vector<double> row_sums() const;
  std::vector<double> column_sums() const;
};

/// Weights below this are dropped (and the remainder renormalised) before
/// the transport problem is set up.
inline constexpr double kPruneThreshold = 1e-12;

/// Optimal coupling between p and q under cost d_ij^order.
TransportPlan transport_plan(const Distribution& p, const Distribution& q, const MetricSpace& space,
                             const DistanceConfig& cfg = {});

/// Wasserstein-order distance [min_P sum P_ij d_ij^order]^(1/order).
double wasserstein(const Distribution& p, const Distribution& q, const MetricSpace& space,
                   const DistanceConfig& cfg = {});

/// Closed-form transport on the real line. `positions` must be strictly
/// increasing. Order 1 integrates |F_p - F_q|; higher orders use the
/// monotone (quantile) coupling.
double wasserstein_1d(const Distribution& p, const Distribution& q, std::span<const double> positions,
                      const DistanceConfig& cfg = {});

/// -sum p_i ln p_i over the support.
double shannon_entropy(const Distribution& p);

}  // namespace qdist
