#pragma once

// Open XXZ spin-1/2 chain with a single-site field, restricted to a sector of
// fixed magnetisation. Site i is bit i of a configuration mask; a set bit is
// spin up (s^z = +1/2).

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "qdist/chaos.hpp"
#include "qdist/eigensystem.hpp"
#include "qdist/types.hpp"

namespace qdist {

struct SpinChainParams {
  int n_sites = 15;
  int n_up = 5;
  double J1 = 1.0;
  double J2 = 0.5;
  double eps = 0.5;
  int defect_site = 2;

  void validate() const;
};

/// All masks over n_sites bits with n_up set bits, ascending.
std::vector<std::uint64_t> spin_configurations(int n_sites, int n_up);

/// H = sum_i h_i s^z_i + sum_i [J1 (s^x_i s^x_{i+1} + s^y_i s^y_{i+1}) + J2 s^z_i s^z_{i+1}],
/// h_i = eps * delta(i, defect_site), on the spin_configurations basis.
Matrix build_xxz_hamiltonian(const SpinChainParams& params);

struct LevelStatistics {
  /// Nearest-neighbour spacings of the kept levels divided by their mean.
  std::vector<double> spacings;
  std::size_t levels_used = 0;
  double mean_spacing = 0.0;
  /// Histogram of the normalised spacings (density) with reference curves.
  std::vector<double> bin_centers;
  std::vector<double> density;
  std::vector<double> poisson;
  std::vector<double> wigner;
  /// Kolmogorov-Smirnov distances to 1 - exp(-s) and 1 - exp(-pi s^2 / 4).
  double ks_poisson = 0.0;
  double ks_wigner = 0.0;
};

/// Drops `edge_fraction` of the levels at each end of the sorted spectrum.
/// Refuses spectra with fewer than 100 levels.
LevelStatistics level_spacing_statistics(std::span<const double> sorted_levels, double edge_fraction = 0.1,
                                         double bin_width = 0.1, double s_max = 4.0);
LevelStatistics level_spacing_statistics(const Eigensystem& eig, double edge_fraction = 0.1);

/// Configurations with one block of consecutive up spins, ordered by the
/// position of the first up spin.
std::vector<std::uint64_t> localized_initial_states(const SpinChainParams& params);

struct SpinChaosResult {
  std::vector<std::uint64_t> states;
  std::vector<double> upsilon;
};

/// Upsilon of every localized initial state against the uniform
/// distribution on the sector, with the occupied-positions metric.
/// Diagonalises the Hamiltonian unless `eig` is supplied.
SpinChaosResult spin_chaos_measure(const SpinChainParams& params, std::shared_ptr<const Eigensystem> eig = nullptr,
                                   unsigned threads = 1);

}  // namespace qdist
