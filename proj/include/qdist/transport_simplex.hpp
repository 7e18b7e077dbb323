#pragma once

// Primal network simplex for the balanced transportation problem
//
//   min  sum_ij C_ij x_ij   s.t.  sum_j x_ij = a_i,  sum_i x_ij = b_j,  x >= 0.
//
// Uncapacitated arcs, big-M artificial root, strongly feasible spanning tree
// (Cunningham's leaving-arc rule) and block-search pricing. Non-tree arcs are
// always at their lower bound, so only tree flows are stored.

#include <cstddef>
#include <span>
#include <vector>

#include "qdist/ot.hpp"

namespace qdist {

struct TransportSolution {
  std::vector<TransportEntry> entries;  // indices into supply / demand
  double cost = 0.0;
  std::size_t pivots = 0;
};

/// `cost` is row-major, supply.size() x demand.size(). Supplies and demands
/// must be strictly positive with equal totals (up to rounding; the solver
/// absorbs a relative mismatch below 1e-12 into the largest demand).
TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const double> cost);

}  // namespace qdist
