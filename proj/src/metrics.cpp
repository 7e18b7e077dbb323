#include "qdist/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qdist/transport_simplex.hpp"

namespace qdist {
namespace {

double minimal_image(double delta, double period) {
  double d = std::fmod(std::abs(delta), period);
  return std::min(d, period - d);
}

void check_sites(int n_sites) {
  if (n_sites < 1 || n_sites > 64) throw std::invalid_argument("metric: n_sites must be in [1, 64]");
}

}  // namespace

std::vector<int> occupied_sites(std::uint64_t config, int n_sites) {
  std::vector<int> sites;
  for (int i = 0; i < n_sites; ++i)
    if ((config >> i) & 1u) sites.push_back(i);
  return sites;
}

MetricSpace line_metric(std::span<const double> positions) {
  const auto n = static_cast<Eigen::Index>(positions.size());
  if (n == 0) throw std::invalid_argument("line_metric: no points");
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::abs(positions[i] - positions[j]);
  return MetricSpace::from_matrix(std::move(d));
}

MetricSpace torus_metric_1d(std::span<const double> positions, double period) {
  if (!(period > 0.0)) throw std::invalid_argument("torus_metric_1d: period must be positive");
  const auto n = static_cast<Eigen::Index>(positions.size());
  if (n == 0) throw std::invalid_argument("torus_metric_1d: no points");
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = i == j ? 0.0 : minimal_image(positions[i] - positions[j], period);
  return MetricSpace::from_matrix(std::move(d));
}

MetricSpace torus_product_metric(std::span<const std::vector<double>> points,
                                 std::span<const std::optional<double>> periods, double scale) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n == 0) throw std::invalid_argument("torus_product_metric: no points");
  if (!(scale > 0.0)) throw std::invalid_argument("torus_product_metric: scale must be positive");
  const std::size_t k = periods.size();
  for (const auto& p : points)
    if (p.size() != k) throw std::invalid_argument("torus_product_metric: coordinate count mismatch");
  for (const auto& per : periods)
    if (per && !(*per > 0.0)) throw std::invalid_argument("torus_product_metric: periods must be positive");

  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        const double delta = points[i][c] - points[j][c];
        const double dc = periods[c] ? minimal_image(delta, *periods[c]) : std::abs(delta);
        s += dc * dc;
      }
      d(i, j) = d(j, i) = scale * std::sqrt(s);
    }
  }
  return MetricSpace::from_matrix(std::move(d));
}

MetricSpace hamming_metric(std::span<const std::uint64_t> configs, int n_sites) {
  check_sites(n_sites);
  const std::uint64_t mask = n_sites == 64 ? ~0ull : ((1ull << n_sites) - 1);
  const auto n = static_cast<Eigen::Index>(configs.size());
  if (n == 0) throw std::invalid_argument("hamming_metric: no configurations");
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::popcount((configs[i] ^ configs[j]) & mask);
  return MetricSpace::from_matrix(std::move(d));
}

MetricSpace occupied_positions_metric(std::span<const std::uint64_t> configs, int n_sites) {
  check_sites(n_sites);
  const auto n = static_cast<Eigen::Index>(configs.size());
  if (n == 0) throw std::invalid_argument("occupied_positions_metric: no configurations");
  std::vector<std::vector<int>> sites;
  sites.reserve(configs.size());
  for (auto c : configs) {
    if (n_sites < 64 && (c >> n_sites) != 0) throw std::invalid_argument("occupied_positions_metric: bit outside chain");
    sites.push_back(occupied_sites(c, n_sites));
  }
  const std::size_t count = sites.front().size();
  for (const auto& s : sites)
    if (s.size() != count) throw std::invalid_argument("occupied_positions_metric: configurations differ in particle number");

  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      int s = 0;
      for (std::size_t k = 0; k < count; ++k) s += std::abs(sites[i][k] - sites[j][k]);
      d(i, j) = d(j, i) = s;
    }
  }
  return MetricSpace::from_matrix(std::move(d));
}

double fock_distance(std::span<const int> n, std::span<const int> m, const Matrix& mode_metric,
                     std::span<const double> vacuum_distances) {
  const std::size_t k = n.size();
  if (m.size() != k || static_cast<std::size_t>(mode_metric.rows()) != k ||
      static_cast<std::size_t>(mode_metric.cols()) != k || vacuum_distances.size() != k)
    throw std::invalid_argument("fock_distance: dimension mismatch");
  for (int x : n)
    if (x < 0) throw std::invalid_argument("fock_distance: negative occupation");
  for (int x : m)
    if (x < 0) throw std::invalid_argument("fock_distance: negative occupation");

  const int total_n = std::accumulate(n.begin(), n.end(), 0);
  const int total_m = std::accumulate(m.begin(), m.end(), 0);
  const int total = std::max(total_n, total_m);
  if (total == 0) return 0.0;

  // Mode 0 is the vacuum; it absorbs the particle-number difference.
  auto mode_cost = [&](std::size_t a, std::size_t b) {
    if (a == 0 && b == 0) return 0.0;
    if (a == 0) return vacuum_distances[b - 1];
    if (b == 0) return vacuum_distances[a - 1];
    return mode_metric(static_cast<Eigen::Index>(a - 1), static_cast<Eigen::Index>(b - 1));
  };
  std::vector<std::size_t> src, dst;
  std::vector<double> supply, demand;
  for (std::size_t a = 0; a <= k; ++a) {
    const int na = a == 0 ? total - total_n : n[a - 1];
    if (na > 0) {
      src.push_back(a);
      supply.push_back(na);
    }
    const int ma = a == 0 ? total - total_m : m[a - 1];
    if (ma > 0) {
      dst.push_back(a);
      demand.push_back(ma);
    }
  }
  std::vector<double> cost(src.size() * dst.size());
  for (std::size_t i = 0; i < src.size(); ++i)
    for (std::size_t j = 0; j < dst.size(); ++j) cost[i * dst.size() + j] = mode_cost(src[i], dst[j]);
  return solve_transport(supply, demand, cost).cost;
}

MetricSpace fock_metric(std::span<const std::vector<int>> occupations, const Matrix& mode_metric,
                        std::span<const double> vacuum_distances) {
  const auto n = static_cast<Eigen::Index>(occupations.size());
  if (n == 0) throw std::invalid_argument("fock_metric: no states");
  if ((mode_metric - mode_metric.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("fock_metric: mode metric must be symmetric");
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = fock_distance(occupations[i], occupations[j], mode_metric, vacuum_distances);
  return MetricSpace::from_matrix(std::move(d));
}

}  // namespace qdist
