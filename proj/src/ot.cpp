#include "qdist/ot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qdist/transport_simplex.hpp"

namespace qdist {

MetricSpace MetricSpace::from_matrix(Matrix dist) {
  if (dist.rows() != dist.cols() || dist.rows() == 0)
    throw std::invalid_argument("MetricSpace: distance matrix must be square and non-empty");
  const Eigen::Index n = dist.rows();
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = dist(i, j);
      if (!std::isfinite(d)) throw std::invalid_argument("MetricSpace: non-finite distance (metrics must be bounded)");
      if (d < 0.0) throw std::invalid_argument("MetricSpace: negative distance");
      scale = std::max(scale, d);
    }
  }
  const double tol = 1e-12 * std::max(1.0, scale);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) throw std::invalid_argument("MetricSpace: non-zero self distance");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(dist(i, j) - dist(j, i)) > tol) throw std::invalid_argument("MetricSpace: asymmetric distance");
      dist(j, i) = dist(i, j);
    }
  }
  return MetricSpace(std::make_shared<const Matrix>(std::move(dist)));
}

double MetricSpace::diameter() const { return dist_ ? dist_->maxCoeff() : 0.0; }

MetricSpace MetricSpace::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw std::invalid_argument("MetricSpace::scaled: factor must be positive");
  return MetricSpace(std::make_shared<const Matrix>(*dist_ * factor));
}

Distribution Distribution::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("Distribution: empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("Distribution: weights must be finite and non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > kNormTolerance)
    throw std::invalid_argument("Distribution: weights sum to " + std::to_string(total) + ", expected 1");
  return Distribution(std::move(weights));
}

Distribution Distribution::normalized(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("Distribution: empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("Distribution: weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("Distribution: total weight must be positive");
  for (double& w : weights) w /= total;
  return Distribution(std::move(weights));
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Distribution::uniform: n must be positive");
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(std::size_t n, std::size_t at) {
  if (at >= n) throw std::invalid_argument("Distribution::point_mass: index out of range");
  std::vector<double> w(n, 0.0);
  w[at] = 1.0;
  return Distribution(std::move(w));
}

void DistanceConfig::validate() const {
  if (order < 1) throw std::invalid_argument("DistanceConfig: order must be >= 1");
}

Matrix TransportPlan::dense() const {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (const auto& e : entries) m(static_cast<Eigen::Index>(e.source), static_cast<Eigen::Index>(e.target)) += e.mass;
  return m;
}

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> s(size, 0.0);
  for (const auto& e : entries) s[e.source] += e.mass;
  return s;
}

std::vector<double> TransportPlan::column_sums() const {
  std::vector<double> s(size, 0.0);
  for (const auto& e : entries) s[e.target] += e.mass;
  return s;
}

namespace {

struct Support {
  std::vector<std::size_t> index;
  std::vector<double> mass;
};

Support pruned_support(const Distribution& p) {
  Support s;
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= kPruneThreshold) {
      s.index.push_back(i);
      s.mass.push_back(p[i]);
      total += p[i];
    }
  }
  if (s.index.empty()) throw std::invalid_argument("wasserstein: distribution has no mass above the prune threshold");
  for (double& m : s.mass) m /= total;
  return s;
}

void check_inputs(const Distribution& p, const Distribution& q, const MetricSpace& space, const DistanceConfig& cfg) {
  cfg.validate();
  if (p.size() != q.size() || p.size() != space.size())
    throw std::invalid_argument("wasserstein: size mismatch between distributions and metric space");
}

}  // namespace

TransportPlan transport_plan(const Distribution& p, const Distribution& q, const MetricSpace& space,
                             const DistanceConfig& cfg) {
  check_inputs(p, q, space, cfg);
  const Support a = pruned_support(p);
  const Support b = pruned_support(q);

  std::vector<double> cost(a.index.size() * b.index.size());
  const Matrix& d = space.matrix();
  for (std::size_t i = 0; i < a.index.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(a.index[i]);
    double* out = cost.data() + i * b.index.size();
    for (std::size_t j = 0; j < b.index.size(); ++j) {
      const double dij = d(row, static_cast<Eigen::Index>(b.index[j]));
      out[j] = cfg.order == 1 ? dij : std::pow(dij, cfg.order);
    }
  }
  const TransportSolution sol = solve_transport(a.mass, b.mass, cost);

  TransportPlan plan;
  plan.size = p.size();
  plan.cost = sol.cost;
  plan.entries.reserve(sol.entries.size());
  for (const auto& e : sol.entries) plan.entries.push_back({a.index[e.source], b.index[e.target], e.mass});
  return plan;
}

double wasserstein(const Distribution& p, const Distribution& q, const MetricSpace& space, const DistanceConfig& cfg) {
  const TransportPlan plan = transport_plan(p, q, space, cfg);
  const double c = std::max(0.0, plan.cost);
  return cfg.order == 1 ? c : std::pow(c, 1.0 / cfg.order);
}

double wasserstein_1d(const Distribution& p, const Distribution& q, std::span<const double> positions,
                      const DistanceConfig& cfg) {
  cfg.validate();
  const std::size_t n = positions.size();
  if (p.size() != n || q.size() != n) throw std::invalid_argument("wasserstein_1d: size mismatch");
  for (std::size_t i = 1; i < n; ++i)
    if (!(positions[i] > positions[i - 1])) throw std::invalid_argument("wasserstein_1d: positions must be strictly increasing");

  if (cfg.order == 1) {
    double cdf_gap = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      cdf_gap += p[i] - q[i];
      total += std::abs(cdf_gap) * (positions[i + 1] - positions[i]);
    }
    return total;
  }

  // Monotone coupling: walk both CDFs and match mass in order.
  std::size_t i = 0, j = 0;
  double left_p = p[0], left_q = q[0];
  double total = 0.0;
  while (i < n && j < n) {
    const double m = std::min(left_p, left_q);
    if (m > 0.0) total += m * std::pow(std::abs(positions[i] - positions[j]), cfg.order);
    left_p -= m;
    left_q -= m;
    if (left_p <= 0.0) {
      if (++i < n) left_p = p[i];
    }
    if (left_q <= 0.0) {
      if (++j < n) left_q = q[j];
    }
  }
  return std::pow(std::max(0.0, total), 1.0 / cfg.order);
}

double shannon_entropy(const Distribution& p) {
  double h = 0.0;
  for (double w : p.weights())
    if (w > 0.0) h -= w * std::log(w);
  return h;
}

}  // namespace qdist
