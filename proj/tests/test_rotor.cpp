#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "qdist/rotor.hpp"

using namespace qdist;

TEST_CASE("standard map") {
  const auto fixed = standard_map_step({0.0, 0.0}, 2.3);
  CHECK(fixed.q == 0.0);
  CHECK(fixed.p == 0.0);

  const auto free = standard_map_step({1.0, 2.0}, 0.0);
  CHECK(free.p == doctest::Approx(2.0));
  CHECK(free.q == doctest::Approx(3.0));
  const auto wrapped = standard_map_step({5.0, 2.0}, 0.0);
  CHECK(wrapped.q == doctest::Approx(7.0 - kTwoPi));

  const auto s = standard_map_step({4.7, 3.0}, 1.5);
  const double p = std::fmod(3.0 + 1.5 * std::sin(4.7) + kTwoPi, kTwoPi);
  CHECK(s.p == doctest::Approx(p).epsilon(1e-14));
  CHECK(s.q == doctest::Approx(std::fmod(4.7 + p, kTwoPi)).epsilon(1e-14));
}

TEST_CASE("standard map preserves area") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1.0, 2.0);
  const double h = 1e-6;
  for (int i = 0; i < 50; ++i) {
    const ClassicalPoint x{u(rng), u(rng)};
    const double K = 0.2;  // small kick keeps the images away from the wrap
    const auto a = standard_map_step({x.q + h, x.p}, K), b = standard_map_step({x.q - h, x.p}, K);
    const auto c = standard_map_step({x.q, x.p + h}, K), d = standard_map_step({x.q, x.p - h}, K);
    const double j11 = (a.q - b.q) / (2 * h), j21 = (a.p - b.p) / (2 * h);
    const double j12 = (c.q - d.q) / (2 * h), j22 = (c.p - d.p) / (2 * h);
    CHECK(std::abs(j11 * j22 - j12 * j21 - 1.0) <= 1e-6);
  }
}

TEST_CASE("finite-time Lyapunov exponent separates regular and chaotic starts") {
  CHECK(finite_time_lyapunov({1.0, 0.5}, 0.1, 500) < 0.05);
  CHECK(finite_time_lyapunov({1.0, 0.5}, 6.0, 500) > 0.8);
}

TEST_CASE("Floquet operator is unitary and matches the split-step propagation") {
  const RotorParams params{4.7, 20};
  const RotorFloquet f(params);
  const CMatrix u = f.matrix();
  CHECK((u.adjoint() * u - CMatrix::Identity(400, 400)).cwiseAbs().maxCoeff() <= 1e-10);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  CVector a(400);
  for (auto& z : a) z = Complex(g(rng), g(rng));
  const auto psi = StateVector::normalized(a);
  const auto next = f.step(psi);
  CHECK(std::abs(next.amplitudes().norm() - 1.0) <= 1e-10);
  CHECK((next.amplitudes() - u * psi.amplitudes()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((floquet_step(psi, params).amplitudes() - next.amplitudes()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(f.step(StateVector::basis_state(10, 0)), std::invalid_argument);
}

TEST_CASE("free rotation keeps momentum probabilities") {
  const RotorParams params{0.0, 12};
  const RotorFloquet f(params);
  const int dim = params.dim();
  for (int k : {0, 5, 77}) {
    CVector mom = CVector::Zero(dim);
    mom(k) = 1.0;
    CVector x(dim);
    for (int n = 0; n < dim; ++n) x(n) = std::polar(1.0 / std::sqrt(dim), kTwoPi * k * n / dim);
    auto psi = StateVector::from_amplitudes(x);
    for (int t = 0; t < 5; ++t) psi = f.step(psi);
    const CVector after = f.to_momentum(psi.amplitudes());
    for (int j = 0; j < dim; ++j) CHECK(std::abs(std::norm(after(j)) - (j == k ? 1.0 : 0.0)) <= 1e-12);
  }
}

TEST_CASE("packet centroid follows the classical map for one kick") {
  const RotorParams params{0.3, 30};
  const RotorFloquet f(params);
  const ClassicalPoint start{4.7, 3.0};
  const auto psi = rotor_packet(params, start);
  const auto at0 = rotor_expectation(f, psi);
  CHECK(torus_distance(at0, start) <= 0.02);
  const auto at1 = rotor_expectation(f, f.step(psi));
  CHECK(torus_distance(at1, standard_map_step(start, params.K)) <= 0.1);
}

TEST_CASE("three distances start equal and overlaps stay constant") {
  const RotorParams params{1.5, 30};
  const ClassicalPoint s1{4.7, 3.0};
  const auto s2 = neighbour_start(params, s1);
  const auto r = three_distance_experiment(params, s1, s2, 10);
  REQUIRE(r.kick.size() == 11);
  const double separation = kTwoPi * std::sqrt(2.0) / params.m;
  const double cell = kTwoPi / params.m;
  CHECK(r.classical[0] == doctest::Approx(separation).epsilon(1e-12));
  CHECK(std::abs(r.physical[0] - separation) <= cell);
  CHECK(std::abs(r.expectation[0] - separation) <= cell);
  for (double o : r.overlap) CHECK(std::abs(o - r.overlap[0]) <= 1e-8);
  double peak = 0.0;
  for (double d : r.physical) peak = std::max(peak, d);
  CHECK(peak > 3.0 * r.physical[0]);
  CHECK_THROWS_AS(three_distance_experiment(params, {7.0, 0.0}, s2, 3), std::invalid_argument);
}

TEST_CASE("chaos scan on a small torus") {
  RotorScanOptions opt;
  opt.threads = 2;
  const auto still = chaos_scan({0.0, 8}, opt);
  const auto kicked = chaos_scan({5.0, 8}, opt);
  REQUIRE(still.values.size() == 64);
  CHECK(still.missing() == 0);
  for (const auto& v : kicked.values) CHECK(*v >= 0.0);
  // Without kicks momentum is conserved, so no packet relaxes towards uniform.
  CHECK(*still.min() > *kicked.median());
  CHECK(still.metadata.at("K") == "0");

  const auto serial = chaos_scan({5.0, 8}, RotorScanOptions{});
  for (std::size_t i = 0; i < 64; ++i) CHECK(*serial.values[i] == *kicked.values[i]);

  RotorScanOptions tight;
  tight.max_dim = 50;
  CHECK_THROWS_AS(chaos_scan({1.0, 8}, tight), ResourceError);
}

TEST_CASE("long-time cell distribution is normalised") {
  const RotorParams params{2.0, 8};
  const RotorFloquet f(params);
  auto eig = std::make_shared<const Eigensystem>(diagonalize_unitary(f.matrix()));
  CHECK(eig->residual(f.matrix()) < 1e-8);
  const auto basis = rotor_cell_basis(params);
  const DiagonalEnsembleProjector projector(eig, basis);
  for (std::size_t i = 0; i < 64; i += 7) {
    const auto c = rotor_cell_center(8, i);
    const auto p = projector.distribution(rotor_packet(params, {c.x, c.p}));
    double total = 0.0;
    for (double w : p.weights()) total += w;
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}
