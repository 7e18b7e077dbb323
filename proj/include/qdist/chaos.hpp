#pragma once

// Model-independent chaos diagnostics.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdist/eigensystem.hpp"
#include "qdist/ot.hpp"
#include "qdist/quantum.hpp"

namespace qdist {

/// Distance between two trajectories sampled at strictly increasing times.
struct DistanceSeries {
  std::vector<double> times;
  std::vector<double> values;

  void validate() const;
};

/// Closed time interval [t_start, t_end] and the number of samples in it.
struct FitWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t samples = 0;

  bool empty() const { return samples < 2; }
};

struct LyapunovFit {
  double gamma = 0.0;
  double intercept = 0.0;
  FitWindow window;
  /// Root-mean-square residual of ln D about the fitted line.
  double residual = 0.0;
  /// Standard error of gamma (0 for fewer than three samples).
  double standard_error = 0.0;
};

/// Least-squares slope of ln D against t over the samples inside `window`.
/// Throws for non-positive distances in the window or fewer than 4 samples.
LyapunovFit lyapunov_exponent(const DistanceSeries& series, const FitWindow& window);

/// Window from the first sample up to the last sample before D first exceeds
/// saturation_fraction * diameter; the whole series if it never does.
/// Throws if the very first sample is already saturated.
FitWindow ehrenfest_window(const DistanceSeries& series, double diameter, double saturation_fraction = 0.25);

struct ChaosMeasureResult {
  double upsilon = 0.0;
  Distribution long_time;
};

/// Upsilon = W(reference, distribution of the diagonal ensemble of psi0 on
/// `basis`). The reference is uniform over the basis labels when omitted.
ChaosMeasureResult chaos_measure(const StateVector& psi0, const Eigensystem& eig, const LabeledBasis& basis,
                                 const std::optional<Distribution>& reference = std::nullopt,
                                 const DistanceConfig& cfg = {});
ChaosMeasureResult chaos_measure(const DensityMatrix& rho0, const Eigensystem& eig, const LabeledBasis& basis,
                                 const std::optional<Distribution>& reference = std::nullopt,
                                 const DistanceConfig& cfg = {});
/// Same through a precomputed projector; `space` must match its labels.
ChaosMeasureResult chaos_measure(const DiagonalEnsembleProjector& projector, const StateVector& psi0,
                                 const MetricSpace& space, const std::optional<Distribution>& reference = std::nullopt,
                                 const DistanceConfig& cfg = {});

/// Grid of Upsilon values over two initial-condition coordinates. Row r has
/// coordinate y[r], column c has x[c]; missing points are std::nullopt.
struct ChaosScanResult {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::optional<double>> values;  // row-major, y.size() * x.size()
  std::map<std::string, std::string> metadata;

  ChaosScanResult() = default;
  ChaosScanResult(std::vector<double> xs, std::vector<double> ys);

  std::size_t rows() const { return y.size(); }
  std::size_t cols() const { return x.size(); }
  std::optional<double>& at(std::size_t row, std::size_t col) { return values.at(row * cols() + col); }
  const std::optional<double>& at(std::size_t row, std::size_t col) const { return values.at(row * cols() + col); }
  std::size_t missing() const;
  /// Median over present values; nullopt if none.
  std::optional<double> median() const;
  std::optional<double> min() const;
  std::optional<double> max() const;
};

}  // namespace qdist
