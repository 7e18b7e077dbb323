#include "doctest.h"

#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "qdist/xxz.hpp"

using namespace qdist;

namespace {

// Full 2^n Hamiltonian from Kronecker products of single-site operators.
Matrix full_chain_hamiltonian(const SpinChainParams& p) {
  const int n = p.n_sites;
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix sx(2, 2), sz(2, 2);
  sx << 0.0, 0.5, 0.5, 0.0;
  sz << -0.5, 0.0, 0.0, 0.5;  // index 1 = up
  CMatrix sy(2, 2);
  sy << 0.0, Complex(0.0, 0.5), Complex(0.0, -0.5), 0.0;
  // Bit i of the state index is site i, so site i is the i-th factor from the right.
  auto embed = [&](const std::vector<std::pair<int, CMatrix>>& ops) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (int site = n - 1; site >= 0; --site) {
      CMatrix f = CMatrix::Identity(2, 2);
      for (const auto& [s, m] : ops)
        if (s == site) f = m;
      CMatrix next(out.rows() * 2, out.cols() * 2);
      for (Eigen::Index a = 0; a < out.rows(); ++a)
        for (Eigen::Index b = 0; b < out.cols(); ++b) next.block(2 * a, 2 * b, 2, 2) = out(a, b) * f;
      out = next;
    }
    return out;
  };
  const CMatrix csx = sx.cast<Complex>(), csz = sz.cast<Complex>();
  CMatrix h = CMatrix::Zero(dim, dim);
  h += p.eps * embed({{p.defect_site, csz}});
  for (int i = 0; i + 1 < n; ++i) {
    h += p.J1 * (embed({{i, csx}, {i + 1, csx}}) + embed({{i, sy}, {i + 1, sy}}));
    h += p.J2 * embed({{i, csz}, {i + 1, csz}});
  }
  REQUIRE(h.imag().cwiseAbs().maxCoeff() < 1e-14);
  return h.real();
}

std::uint64_t reverse_bits(std::uint64_t m, int n) {
  std::uint64_t r = 0;
  for (int i = 0; i < n; ++i)
    if ((m >> i) & 1u) r |= 1ull << (n - 1 - i);
  return r;
}

}  // namespace

TEST_CASE("two-site sector") {
  SpinChainParams p{2, 1, 1.0, 0.5, 0.0, 0};
  const Matrix h = build_xxz_hamiltonian(p);
  REQUIRE(h.rows() == 2);
  CHECK(h(0, 0) == doctest::Approx(-0.125));
  CHECK(h(1, 1) == doctest::Approx(-0.125));
  CHECK(h(0, 1) == doctest::Approx(0.5));
  CHECK(h(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("sector Hamiltonian equals the restriction of the full-chain operator") {
  SpinChainParams p{6, 3, 1.0, 0.5, 0.37, 2};
  const Matrix full = full_chain_hamiltonian(p);
  const auto basis = spin_configurations(6, 3);
  const Matrix h = build_xxz_hamiltonian(p);
  REQUIRE(static_cast<std::size_t>(h.rows()) == basis.size());
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (std::size_t b = 0; b < basis.size(); ++b)
      CHECK(std::abs(h(a, b) - full(static_cast<Eigen::Index>(basis[a]), static_cast<Eigen::Index>(basis[b]))) <= 1e-14);
  // The full operator never couples different magnetisations.
  for (Eigen::Index a = 0; a < full.rows(); ++a)
    for (Eigen::Index b = 0; b < full.cols(); ++b)
      if (full(a, b) != 0.0) CHECK(std::popcount(static_cast<std::uint64_t>(a)) == std::popcount(static_cast<std::uint64_t>(b)));
}

TEST_CASE("configurations and Hermiticity at the production size") {
  const auto confs = spin_configurations(15, 5);
  CHECK(confs.size() == 3003);
  for (std::size_t i = 1; i < confs.size(); ++i) CHECK(confs[i] > confs[i - 1]);
  for (auto c : confs) CHECK(std::popcount(c) == 5);
  const Matrix h = build_xxz_hamiltonian(SpinChainParams{});
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reflection symmetry") {
  const int n = 9;
  const auto basis = spin_configurations(n, 4);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Matrix perm = Matrix::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const auto r = std::lower_bound(basis.begin(), basis.end(), reverse_bits(basis[a], n)) - basis.begin();
    perm(r, a) = 1.0;
  }
  const Matrix h0 = build_xxz_hamiltonian({n, 4, 1.0, 0.5, 0.0, 2});
  CHECK((perm * h0 * perm.transpose() - h0).cwiseAbs().maxCoeff() < 1e-14);

  const auto left = diagonalize(build_xxz_hamiltonian({n, 4, 1.0, 0.5, 0.5, 2}));
  const auto right = diagonalize(build_xxz_hamiltonian({n, 4, 1.0, 0.5, 0.5, n - 1 - 2}));
  CHECK((left.values - right.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("level statistics on synthetic spectra") {
  std::vector<double> ladder(200);
  for (std::size_t i = 0; i < ladder.size(); ++i) ladder[i] = 0.3 * i;
  const auto st = level_spacing_statistics(ladder);
  CHECK(st.levels_used == 160);
  for (double s : st.spacings) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(level_spacing_statistics(std::vector<double>(99, 0.0)), std::invalid_argument);

  std::mt19937_64 rng(12);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> poisson(2000);
  double e = 0.0;
  for (auto& v : poisson) v = e += expo(rng);
  const auto sp = level_spacing_statistics(poisson);
  CHECK(sp.ks_poisson < sp.ks_wigner);
  double integral = 0.0;
  for (double d : sp.density) integral += d * 0.1;
  CHECK(integral <= 1.0 + 1e-12);
  CHECK(integral > 0.95);

  // GOE matrix: level repulsion.
  std::normal_distribution<double> g;
  Matrix a(400, 400);
  for (Eigen::Index i = 0; i < 400; ++i)
    for (Eigen::Index j = 0; j < 400; ++j) a(i, j) = g(rng);
  const auto goe = diagonalize(Matrix(0.5 * (a + a.transpose())));
  // The semicircle density varies across the bulk; keep the central half.
  const auto sg = level_spacing_statistics(goe, 0.25);
  CHECK(sg.ks_wigner < sg.ks_poisson);
}

TEST_CASE("localized initial states") {
  const auto s = localized_initial_states({5, 2, 1.0, 0.5, 0.0, 0});
  REQUIRE(s.size() == 4);
  CHECK(s[0] == 0b00011);
  CHECK(s[1] == 0b00110);
  CHECK(s[2] == 0b01100);
  CHECK(s[3] == 0b11000);
  const auto big = localized_initial_states(SpinChainParams{});
  CHECK(big.size() == 11);
  CHECK(big.front() == 0b11111);
}

TEST_CASE("spin chaos measure on a small chain") {
  SpinChainParams p{8, 3, 1.0, 0.5, 0.5, 2};
  const auto one = spin_chaos_measure(p, nullptr, 1);
  const auto four = spin_chaos_measure(p, nullptr, 4);
  REQUIRE(one.upsilon.size() == 6);
  for (std::size_t k = 0; k < one.upsilon.size(); ++k) {
    CHECK(one.upsilon[k] >= 0.0);
    CHECK(one.upsilon[k] == four.upsilon[k]);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(build_xxz_hamiltonian({5, 6, 1.0, 0.5, 0.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(build_xxz_hamiltonian({5, 2, 1.0, 0.5, 0.0, 5}), std::invalid_argument);
  CHECK_THROWS_AS(build_xxz_hamiltonian({30, 15, 1.0, 0.5, 0.0, 0}), ResourceError);
}
