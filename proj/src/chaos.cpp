#include "qdist/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdist {
namespace {

Distribution reference_or_uniform(const std::optional<Distribution>& reference, std::size_t n) {
  if (!reference) return Distribution::uniform(n);
  if (reference->size() != n) throw std::invalid_argument("chaos_measure: reference size mismatch");
  return *reference;
}

std::vector<double> present(const std::vector<std::optional<double>>& values) {
  std::vector<double> v;
  for (const auto& x : values)
    if (x) v.push_back(*x);
  return v;
}

}  // namespace

void DistanceSeries::validate() const {
  if (times.size() != values.size()) throw std::invalid_argument("DistanceSeries: length mismatch");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i])) throw std::invalid_argument("DistanceSeries: non-finite entry");
    if (values[i] < 0.0) throw std::invalid_argument("DistanceSeries: negative distance");
    if (i > 0 && !(times[i] > times[i - 1])) throw std::invalid_argument("DistanceSeries: times must increase strictly");
  }
}

LyapunovFit lyapunov_exponent(const DistanceSeries& series, const FitWindow& window) {
  series.validate();
  std::vector<double> t, y;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (series.times[i] < window.t_start || series.times[i] > window.t_end) continue;
    if (!(series.values[i] > 0.0)) throw std::invalid_argument("lyapunov_exponent: non-positive distance in window");
    t.push_back(series.times[i]);
    y.push_back(std::log(series.values[i]));
  }
  const std::size_t n = t.size();
  if (n < 4) throw std::invalid_argument("lyapunov_exponent: window holds fewer than 4 samples");

  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tm += t[i];
    ym += y[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
  }
  LyapunovFit fit;
  fit.gamma = sty / stt;
  fit.intercept = ym - fit.gamma * tm;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.gamma * t[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.standard_error = std::sqrt(ss / (n - 2) / stt);
  fit.window = {t.front(), t.back(), n};
  return fit;
}

FitWindow ehrenfest_window(const DistanceSeries& series, double diameter, double saturation_fraction) {
  series.validate();
  if (series.times.empty()) throw std::invalid_argument("ehrenfest_window: empty series");
  if (!(diameter > 0.0)) throw std::invalid_argument("ehrenfest_window: diameter must be positive");
  if (!(saturation_fraction > 0.0 && saturation_fraction <= 1.0))
    throw std::invalid_argument("ehrenfest_window: saturation fraction must lie in (0, 1]");
  const double threshold = saturation_fraction * diameter;
  std::size_t k = 0;
  while (k < series.values.size() && series.values[k] <= threshold) ++k;
  if (k == 0) throw std::invalid_argument("ehrenfest_window: series is saturated from the first sample");
  return {series.times.front(), series.times[k - 1], k};
}

ChaosMeasureResult chaos_measure(const StateVector& psi0, const Eigensystem& eig, const LabeledBasis& basis,
                                 const std::optional<Distribution>& reference, const DistanceConfig& cfg) {
  ChaosMeasureResult r;
  r.long_time = project_probabilities_mixed(diagonal_ensemble(psi0, eig), basis);
  r.upsilon = wasserstein(reference_or_uniform(reference, basis.size()), r.long_time, basis.space(), cfg);
  return r;
}

ChaosMeasureResult chaos_measure(const DensityMatrix& rho0, const Eigensystem& eig, const LabeledBasis& basis,
                                 const std::optional<Distribution>& reference, const DistanceConfig& cfg) {
  ChaosMeasureResult r;
  r.long_time = project_probabilities_mixed(diagonal_ensemble(rho0, eig), basis);
  r.upsilon = wasserstein(reference_or_uniform(reference, basis.size()), r.long_time, basis.space(), cfg);
  return r;
}

ChaosMeasureResult chaos_measure(const DiagonalEnsembleProjector& projector, const StateVector& psi0,
                                 const MetricSpace& space, const std::optional<Distribution>& reference,
                                 const DistanceConfig& cfg) {
  if (space.size() != projector.labels()) throw std::invalid_argument("chaos_measure: metric size mismatch");
  ChaosMeasureResult r;
  r.long_time = projector.distribution(psi0);
  r.upsilon = wasserstein(reference_or_uniform(reference, space.size()), r.long_time, space, cfg);
  return r;
}

ChaosScanResult::ChaosScanResult(std::vector<double> xs, std::vector<double> ys)
    : x(std::move(xs)), y(std::move(ys)), values(x.size() * y.size()) {}

std::size_t ChaosScanResult::missing() const {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::nullopt));
}

std::optional<double> ChaosScanResult::median() const {
  auto v = present(values);
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::optional<double> ChaosScanResult::min() const {
  const auto v = present(values);
  if (v.empty()) return std::nullopt;
  return *std::min_element(v.begin(), v.end());
}

std::optional<double> ChaosScanResult::max() const {
  const auto v = present(values);
  if (v.empty()) return std::nullopt;
  return *std::max_element(v.begin(), v.end());
}

}  // namespace qdist
