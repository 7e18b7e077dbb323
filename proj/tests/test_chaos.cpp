#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "qdist/chaos.hpp"
#include "qdist/metrics.hpp"

using namespace qdist;

namespace {

MetricSpace index_line(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
  return line_metric(x);
}

Eigensystem computational_eigensystem(std::size_t n) {
  Eigensystem e;
  e.values.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) e.values(static_cast<Eigen::Index>(i)) = static_cast<double>(i);
  e.vectors = CMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return e;
}

StateVector sqrt_amplitudes(const std::vector<double>& p) {
  CVector a(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) a(static_cast<Eigen::Index>(i)) = std::sqrt(p[i]);
  return StateVector::from_amplitudes(a);
}

}  // namespace

TEST_CASE("Lyapunov fit of exact and constant series") {
  DistanceSeries s;
  for (int t = 0; t <= 10; ++t) {
    s.times.push_back(t);
    s.values.push_back(0.01 * std::exp(0.7 * t));
  }
  const FitWindow all{0.0, 10.0, 11};
  const auto fit = lyapunov_exponent(s, all);
  CHECK(std::abs(fit.gamma - 0.7) <= 1e-9);
  CHECK(fit.residual <= 1e-12);
  CHECK(fit.window.samples == 11);

  DistanceSeries scaled = s;
  for (auto& v : scaled.values) v *= 37.0;
  CHECK(std::abs(lyapunov_exponent(scaled, all).gamma - fit.gamma) <= 1e-12);

  DistanceSeries flat = s;
  for (auto& v : flat.values) v = 0.3;
  CHECK(std::abs(lyapunov_exponent(flat, all).gamma) <= 1e-14);
}

TEST_CASE("Lyapunov fit recovers the rate from noisy data") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 0.05);
  DistanceSeries s;
  for (int i = 0; i <= 60; ++i) {
    const double t = 0.25 * i;
    s.times.push_back(t);
    s.values.push_back(0.002 * std::exp(0.45 * t) * (1.0 + noise(rng)));
  }
  const auto fit = lyapunov_exponent(s, {0.0, 15.0, 61});
  CHECK(std::abs(fit.gamma - 0.45) <= 3.0 * fit.standard_error);
  CHECK(fit.standard_error > 0.0);
}

TEST_CASE("Lyapunov fit errors") {
  DistanceSeries s{{0, 1, 2, 3, 4}, {1, 2, 0, 4, 5}};
  CHECK_THROWS_AS(lyapunov_exponent(s, {0, 4, 5}), std::invalid_argument);
  CHECK_THROWS_AS(lyapunov_exponent(s, {3, 4, 2}), std::invalid_argument);
  DistanceSeries unsorted{{0, 2, 1, 3}, {1, 1, 1, 1}};
  CHECK_THROWS_AS(lyapunov_exponent(unsorted, {0, 3, 4}), std::invalid_argument);
}

TEST_CASE("Ehrenfest window") {
  DistanceSeries s;
  const double dt = 0.01;
  for (int i = 0; i <= 500; ++i) {
    s.times.push_back(i * dt);
    s.values.push_back(std::tanh(i * dt));
  }
  const auto w = ehrenfest_window(s, 1.0, 0.5);
  CHECK(std::abs(w.t_end - std::atanh(0.5)) <= dt);
  CHECK(w.t_start == 0.0);

  DistanceSeries growing{{0, 1, 2, 3}, {0.1, 0.2, 0.3, 0.4}};
  const auto full = ehrenfest_window(growing, 10.0);
  CHECK(full.t_end == 3.0);
  CHECK(full.samples == 4);

  DistanceSeries saturated{{0, 1}, {5.0, 5.0}};
  CHECK_THROWS_AS(ehrenfest_window(saturated, 1.0), std::invalid_argument);
  DistanceSeries jump{{0, 1, 2}, {0.1, 0.9, 0.9}};
  CHECK(ehrenfest_window(jump, 1.0).empty());
}

TEST_CASE("chaos measure on engineered long-time distributions") {
  const std::size_t n = 10;
  const auto basis = LabeledBasis::computational(index_line(n));
  const auto eig = computational_eigensystem(n);

  std::vector<double> pa(n, 0.0), pb(n, 0.0), flat(n, 0.1);
  for (std::size_t i = 0; i < 5; ++i) pa[i] = 0.2;
  for (std::size_t i = 0; i < n; i += 2) pb[i] = 0.2;
  CHECK(chaos_measure(sqrt_amplitudes(pa), eig, basis).upsilon == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(chaos_measure(sqrt_amplitudes(pb), eig, basis).upsilon == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(chaos_measure(sqrt_amplitudes(flat), eig, basis).upsilon <= 1e-12);
  CHECK(chaos_measure(DensityMatrix::maximally_mixed(n), eig, basis).upsilon <= 1e-12);

  auto shared = std::make_shared<const Eigensystem>(eig);
  const DiagonalEnsembleProjector projector(shared, basis);
  CHECK(chaos_measure(projector, sqrt_amplitudes(pa), basis.space()).upsilon == doctest::Approx(2.5).epsilon(1e-12));

  // Reversing the labels is an isometry of the line.
  std::vector<double> reversed(pa.rbegin(), pa.rend());
  CHECK(chaos_measure(sqrt_amplitudes(reversed), eig, basis).upsilon == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("chaos measure with a generic Hamiltonian and maximally mixed input") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  CMatrix a(8, 8);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) a(i, j) = Complex(g(rng), g(rng));
  const auto eig = diagonalize(CMatrix(0.5 * (a + a.adjoint())));
  const auto basis = LabeledBasis::computational(index_line(8));
  CHECK(chaos_measure(DensityMatrix::maximally_mixed(8), eig, basis).upsilon <= 1e-9);
  const auto r = chaos_measure(StateVector::basis_state(8, 0), eig, basis);
  CHECK(r.upsilon >= 0.0);
  double total = 0.0;
  for (double w : r.long_time.weights()) total += w;
  CHECK(std::abs(total - 1.0) <= 1e-9);
}

TEST_CASE("scan result container") {
  ChaosScanResult r({0.0, 1.0, 2.0}, {0.0, 1.0});
  CHECK(r.values.size() == 6);
  CHECK(r.missing() == 6);
  CHECK(!r.median());
  r.at(0, 0) = 3.0;
  r.at(0, 1) = 1.0;
  r.at(1, 2) = 2.0;
  r.at(1, 0) = 10.0;
  CHECK(r.missing() == 2);
  CHECK(*r.median() == 2.5);
  CHECK(*r.min() == 1.0);
  CHECK(*r.max() == 10.0);
}
