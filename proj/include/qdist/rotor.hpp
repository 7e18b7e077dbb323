#pragma once

// Kicked rotor: the standard map and its quantisation on the torus with
// hbar_eff = 2 pi / m^2 (m^2 states, position grid x_n = 2 pi n / m^2).

#include <cstddef>
#include <memory>
#include <vector>

#include "qdist/chaos.hpp"
#include "qdist/eigensystem.hpp"
#include "qdist/phase_basis.hpp"
#include "qdist/quantum.hpp"

namespace qdist {

/// Critical kick strength of the standard map (last KAM torus breaks).
inline constexpr double kStandardMapKc = 0.971635;

struct RotorParams {
  double K = 0.3;
  int m = 30;

  double hbar() const { return kTwoPi / (static_cast<double>(m) * m); }
  int dim() const { return m * m; }
  void validate() const;
};

struct ClassicalPoint {
  double q = 0.0;
  double p = 0.0;
};

/// p' = p + K sin q, q' = q + p' (both mod 2 pi).
ClassicalPoint standard_map_step(const ClassicalPoint& pt, double K);
/// Minimal-image Euclidean distance on the 2 pi x 2 pi torus.
double torus_distance(const ClassicalPoint& a, const ClassicalPoint& b);
/// Largest finite-time Lyapunov exponent over `steps` iterations (tangent map).
double finite_time_lyapunov(const ClassicalPoint& start, double K, int steps);

/// One-period propagator: kick exp(-i K cos q / hbar) in position space,
/// then exp(-i p^2 / (2 hbar)) in momentum space with p taken in (-pi, pi].
class RotorFloquet {
 public:
  explicit RotorFloquet(const RotorParams& params);

  const RotorParams& params() const { return params_; }
  StateVector step(const StateVector& psi) const;
  /// Dense m^2 x m^2 Floquet matrix.
  CMatrix matrix() const;
  /// Momentum-space amplitudes <p_k|psi>.
  CVector to_momentum(const CVector& psi) const;

 private:
  RotorParams params_;
  CVector kick_;
  CVector kinetic_;
  std::shared_ptr<const CMatrix> fourier_;  // F_nk = exp(2 pi i k n / M) / sqrt(M)
};

StateVector floquet_step(const StateVector& state, const RotorParams& params);

/// Gaussian packet at (q, p) with position width sqrt(hbar / 2).
StateVector rotor_packet(const RotorParams& params, const ClassicalPoint& at);

/// Circular means of the position and momentum distributions.
ClassicalPoint rotor_expectation(const RotorFloquet& floquet, const StateVector& psi);

/// Planck-cell basis with the torus metric between cell centres.
LabeledBasis rotor_cell_basis(const RotorParams& params);

struct ThreeDistanceSeries {
  std::vector<int> kick;
  std::vector<double> classical;
  std::vector<double> physical;
  std::vector<double> expectation;
  /// |<psi1(t)|psi2(t)>|.
  std::vector<double> overlap;
};

/// Default second start: one cell diagonally from the first.
ClassicalPoint neighbour_start(const RotorParams& params, const ClassicalPoint& start);

ThreeDistanceSeries three_distance_experiment(const RotorParams& params, const ClassicalPoint& start1,
                                              const ClassicalPoint& start2, int n_kicks,
                                              const DistanceConfig& cfg = {});

struct RotorScanOptions {
  unsigned threads = 1;
  DistanceConfig cfg;
  /// Dimension above which the dense Floquet diagonalisation is refused.
  int max_dim = 2500;
};

/// Upsilon for a packet started at every cell centre (row = momentum cell l,
/// column = position cell t), against the uniform distribution over cells.
ChaosScanResult chaos_scan(const RotorParams& params, const RotorScanOptions& options = {});

/// Upsilon after each of `n_kicks` kicks for a packet started at `start`
/// (finite-time distribution instead of the long-time one).
std::vector<double> rotor_spreading_series(const RotorParams& params, const ClassicalPoint& start, int n_kicks);

}  // namespace qdist
