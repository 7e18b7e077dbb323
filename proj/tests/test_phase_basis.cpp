#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "qdist/phase_basis.hpp"

using namespace qdist;

namespace {

double gram_error(const CMatrix& v) {
  return (v.adjoint() * v - CMatrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

// |<theta_M|col>|^2 on the grid theta_M = origin + 2 pi M / L^2, summed
// directly from the definition of the phase states.
std::vector<double> phase_marginal(const CMatrix& f, int col, int L, double origin) {
  const int dim = L * L;
  std::vector<double> w(dim);
  for (int m = 0; m < dim; ++m) {
    Complex s = 0.0;
    for (int n = 0; n < dim; ++n) s += std::polar(1.0, -n * (origin + kTwoPi * m / dim)) * f(n, col);
    w[m] = std::norm(s) / dim;
  }
  return w;
}

}  // namespace

TEST_CASE("lattice bases are unitary") {
  CHECK(gram_error(build_phase_lattice_1d(2).factor()) <= 1e-14);
  for (int L : {3, 4, 6, 8}) CHECK(gram_error(build_phase_lattice_1d(L).factor()) <= 1e-8);
  const auto b2 = build_phase_lattice_2d(3);
  CHECK(b2.size() == 81);
  CHECK(gram_error(b2.dense()) <= 1e-8);
  CHECK_THROWS_AS(build_phase_lattice_1d(1), std::invalid_argument);
}

TEST_CASE("number expectation and fluctuation identities") {
  for (int L : {4, 6, 8}) {
    const auto rep = localization_report(build_phase_lattice_1d(L));
    const double n = L * L - 1.0;
    for (const auto& row : rep.rows) {
      CHECK(std::abs(row.mean_n - (row.cell.ell * L + (L - 1) / 2.0)) <= 1e-10);
      CHECK(std::abs(row.delta_n - 1.0 / std::sqrt(12.0 * n)) <= 1e-12);
    }
  }
  const auto rep4 = localization_report(build_phase_lattice_1d(4));
  for (const auto& row : rep4.rows)
    if (row.cell.ell == 2) CHECK(row.mean_n == doctest::Approx(9.5).epsilon(1e-12));
  const auto rep6 = localization_report(build_phase_lattice_1d(6));
  CHECK(rep6.rows[0].delta_n == doctest::Approx(1.0 / std::sqrt(12.0 * 35.0)).epsilon(1e-12));
}

TEST_CASE("shifted phase window removes the phase-mean correction") {
  for (int L : {3, 4, 5, 6, 7, 8}) {
    const auto rep = localization_report(build_phase_lattice_1d(L));
    for (const auto& row : rep.rows) CHECK(std::abs(row.c_theta) <= 1e-10);
  }
  // A fixed cut at -pi/L leaves a nonzero correction for some cells.
  const auto fixed = localization_report(build_phase_lattice_1d(6, PhaseWindow{false, -kPi / 6}));
  double worst = 0.0;
  for (const auto& row : fixed.rows) worst = std::max(worst, std::abs(row.c_theta));
  CHECK(worst > 1e-3);
}

TEST_CASE("phase fluctuation decays like L^{-1/2}") {
  std::vector<double> scaled;
  for (int L : {4, 6, 8, 10}) {
    const auto rep = localization_report(build_phase_lattice_1d(L));
    scaled.push_back(rep.max_delta_theta * std::sqrt(static_cast<double>(L)));
    CHECK(rep.fitted_a > 0.1);
    CHECK(rep.fitted_a < 10.0);
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  CHECK(*hi / *lo < 1.5);
}

TEST_CASE("number fluctuation does not depend on the phase index") {
  const auto rep = localization_report(build_phase_lattice_1d(5));
  for (const auto& row : rep.rows) CHECK(row.delta_n == doctest::Approx(rep.rows[0].delta_n).epsilon(1e-13));
}

TEST_CASE("shifting the phase index rotates the phase marginal by one cell") {
  const int L = 5;
  const auto f = build_phase_lattice_1d(L).factor();
  const double origin = -kPi / L;
  for (int l = 0; l < L; ++l) {
    for (int t = 0; t < L; ++t) {
      const auto a = phase_marginal(f, l * L + t, L, origin);
      const auto b = phase_marginal(f, l * L + (t + 1) % L, L, origin);
      for (int m = 0; m < L * L; ++m) CHECK(std::abs(b[(m + L) % (L * L)] - a[m]) <= 1e-12);
    }
  }
}

TEST_CASE("two-dof basis factorises") {
  const int L = 3;
  const auto b = build_phase_lattice_2d(L);
  const CMatrix dense = b.dense();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  CVector psi(81);
  for (auto& z : psi) z = Complex(g(rng), g(rng));
  CHECK((b.analysis(psi) - dense.adjoint() * psi).cwiseAbs().maxCoeff() <= 1e-12);

  // Fock state |N1 = 7, N2 = 0> sits in the l1 = 2, l2 = 0 cells only.
  CVector fock = CVector::Zero(81);
  fock(7 * 9 + 0) = 1.0;
  const CVector c = b.analysis(fock);
  double on_row = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.cell(i, 0).ell == 2 && b.cell(i, 1).ell == 0) on_row += std::norm(c(static_cast<Eigen::Index>(i)));
  CHECK(on_row == doctest::Approx(1.0).epsilon(1e-12));

  // Per-dof number means from the dense vectors.
  for (Eigen::Index col = 0; col < 81; ++col) {
    double n1 = 0.0, n2 = 0.0;
    for (Eigen::Index r = 0; r < 81; ++r) {
      const double w = std::norm(dense(r, col));
      n1 += w * static_cast<double>(r / 9);
      n2 += w * static_cast<double>(r % 9);
    }
    const auto c1 = b.cell(static_cast<std::size_t>(col), 0), c2 = b.cell(static_cast<std::size_t>(col), 1);
    CHECK(std::abs(n1 - (c1.ell * L + 1.0)) <= 1e-10);
    CHECK(std::abs(n2 - (c2.ell * L + 1.0)) <= 1e-10);
    CHECK(b.index({c1, c2}) == static_cast<std::size_t>(col));
  }
}

TEST_CASE("rotor Wannier basis") {
  CHECK(gram_error(rotor_wannier_basis(3).factor()) <= 1e-8);
  CHECK(kTwoPi / 400.0 == doctest::Approx(0.0157).epsilon(1e-3));

  const int m = 10, dim = m * m;
  const auto b = rotor_wannier_basis(m);
  CHECK(gram_error(b.factor()) <= 1e-8);
  CHECK_THROWS_AS(localization_report(b), std::invalid_argument);
  const double hbar = kTwoPi / dim;
  for (int col = 0; col < dim; ++col) {
    // Momentum amplitudes by an explicit inverse transform.
    std::vector<double> pk(dim);
    for (int k = 0; k < dim; ++k) {
      Complex s = 0.0;
      for (int n = 0; n < dim; ++n) s += std::polar(1.0, -kTwoPi * k * n / dim) * b.factor()(n, col);
      pk[k] = std::norm(s) / dim;
    }
    double m1 = 0.0, m2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      m1 += pk[k] * hbar * k;
      m2 += pk[k] * hbar * k * hbar * k;
    }
    const auto center = rotor_cell_center(m, static_cast<std::size_t>(col));
    CHECK(std::abs(m1 - center.p) <= 1e-10);
    const double ratio = std::sqrt(m2 - m1 * m1) / (kTwoPi / m);
    CHECK(std::abs(ratio - std::sqrt(1.0 - 1.0 / (m * m)) / std::sqrt(12.0)) <= 1e-10);

    // Position marginal peaks at the cell's X centre.
    Eigen::Index peak = 0;
    b.factor().col(col).cwiseAbs().maxCoeff(&peak);
    const double x = kTwoPi * static_cast<double>(peak) / dim;
    const double dx = std::remainder(x - center.x, kTwoPi);
    CHECK(std::abs(dx) <= kTwoPi / m / 2.0);
  }
}

TEST_CASE("binary export round trip") {
  const auto b = build_phase_lattice_2d(2);
  const std::string path = "phase_basis_roundtrip.bin";
  export_basis_binary(b, path);
  int L = 0, dof = 0;
  const CMatrix back = import_basis_binary(path, &L, &dof);
  std::remove(path.c_str());
  CHECK(L == 2);
  CHECK(dof == 2);
  CHECK((back - b.dense()).cwiseAbs().maxCoeff() == 0.0);
}
