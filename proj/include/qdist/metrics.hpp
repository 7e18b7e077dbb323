#pragma once

// Constructors for the metric spaces used by the models.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qdist/ot.hpp"

namespace qdist {

/// d(i, j) = |x_i - x_j|.
MetricSpace line_metric(std::span<const double> positions);

/// Minimal-image distance on a circle of circumference `period`.
MetricSpace torus_metric_1d(std::span<const double> positions, double period);

/// Euclidean distance between points in R^k where coordinate c is periodic
/// with period periods[c] when that entry is set (minimal image), plain
/// otherwise. `points` holds one k-vector per point. The result is
/// multiplied by `scale`.
MetricSpace torus_product_metric(std::span<const std::vector<double>> points,
                                 std::span<const std::optional<double>> periods, double scale = 1.0);

/// Number of differing sites between bit masks over `n_sites` sites.
MetricSpace hamming_metric(std::span<const std::uint64_t> configs, int n_sites);

/// L1 distance between the sorted lists of occupied site indices. All
/// configurations must have the same number of set bits.
MetricSpace occupied_positions_metric(std::span<const std::uint64_t> configs, int n_sites);

/// Earth-mover distance between single-mode occupation vectors.
///
/// `occupations[s][i]` is the number of particles of state s in mode i.
/// `mode_metric` holds d_ij between modes; `vacuum_distances[i]` is d_i0.
/// When two states carry different totals the smaller is padded with
/// vacuum occupation so the transport problem stays balanced.
MetricSpace fock_metric(std::span<const std::vector<int>> occupations, const Matrix& mode_metric,
                        std::span<const double> vacuum_distances);

/// Pairwise Fock distance between two occupation vectors (see fock_metric).
double fock_distance(std::span<const int> n, std::span<const int> m, const Matrix& mode_metric,
                     std::span<const double> vacuum_distances);

/// Indices of the set bits of `config`, ascending.
std::vector<int> occupied_sites(std::uint64_t config, int n_sites);

}  // namespace qdist
