#include "qdist/xxz.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qdist/metrics.hpp"
#include "qdist/parallel.hpp"

namespace qdist {
namespace {

constexpr std::size_t kMaxSectorDim = 12000;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double poisson_cdf(double s) { return 1.0 - std::exp(-s); }
double wigner_cdf(double s) { return 1.0 - std::exp(-kPi * s * s / 4.0); }

double ks_distance(const std::vector<double>& sorted, double (*cdf)(double)) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

}  // namespace

void SpinChainParams::validate() const {
  if (n_sites < 2 || n_sites > 62) throw std::invalid_argument("SpinChainParams: n_sites must be in [2, 62]");
  if (n_up < 0 || n_up > n_sites) throw std::invalid_argument("SpinChainParams: n_up must be in [0, n_sites]");
  if (defect_site < 0 || defect_site >= n_sites) throw std::invalid_argument("SpinChainParams: defect_site out of range");
  if (!std::isfinite(J1) || !std::isfinite(J2) || !std::isfinite(eps))
    throw std::invalid_argument("SpinChainParams: couplings must be finite");
  if (binomial(n_sites, n_up) > static_cast<double>(kMaxSectorDim))
    throw ResourceError("SpinChainParams: sector dimension exceeds the dense-diagonalisation guard");
}

std::vector<std::uint64_t> spin_configurations(int n_sites, int n_up) {
  if (n_sites < 1 || n_sites > 62 || n_up < 0 || n_up > n_sites)
    throw std::invalid_argument("spin_configurations: invalid sizes");
  std::vector<std::uint64_t> out;
  if (n_up == 0) return {0};
  // Gosper's hack enumerates equal-popcount masks in increasing order.
  std::uint64_t m = (1ull << n_up) - 1;
  const std::uint64_t limit = 1ull << n_sites;
  while (m < limit) {
    out.push_back(m);
    const std::uint64_t c = m & (~m + 1);
    const std::uint64_t r = m + c;
    m = (((r ^ m) >> 2) / c) | r;
  }
  return out;
}

Matrix build_xxz_hamiltonian(const SpinChainParams& params) {
  params.validate();
  const auto basis = spin_configurations(params.n_sites, params.n_up);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Matrix h = Matrix::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const std::uint64_t s = basis[a];
    auto sz = [s](int i) { return ((s >> i) & 1u) ? 0.5 : -0.5; };
    double diag = params.eps * sz(params.defect_site);
    for (int i = 0; i + 1 < params.n_sites; ++i) {
      diag += params.J2 * sz(i) * sz(i + 1);
      if (((s >> i) & 1u) != ((s >> (i + 1)) & 1u)) {
        const std::uint64_t t = s ^ (3ull << i);
        const auto b = std::lower_bound(basis.begin(), basis.end(), t) - basis.begin();
        h(a, b) += 0.5 * params.J1;
      }
    }
    h(a, a) = diag;
  }
  return h;
}

LevelStatistics level_spacing_statistics(std::span<const double> levels, double edge_fraction, double bin_width,
                                         double s_max) {
  if (levels.size() < 100) throw std::invalid_argument("level_spacing_statistics: fewer than 100 levels");
  if (!(edge_fraction >= 0.0 && edge_fraction < 0.5))
    throw std::invalid_argument("level_spacing_statistics: edge fraction must be in [0, 0.5)");
  if (!(bin_width > 0.0 && s_max > bin_width)) throw std::invalid_argument("level_spacing_statistics: bad histogram");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] < levels[i - 1]) throw std::invalid_argument("level_spacing_statistics: levels must be sorted");

  const auto cut = static_cast<std::size_t>(std::floor(edge_fraction * static_cast<double>(levels.size())));
  const std::size_t lo = cut, hi = levels.size() - cut;  // kept: [lo, hi)
  LevelStatistics st;
  st.levels_used = hi - lo;
  if (st.levels_used < 3) throw std::invalid_argument("level_spacing_statistics: too few levels after trimming");
  for (std::size_t i = lo + 1; i < hi; ++i) st.spacings.push_back(levels[i] - levels[i - 1]);
  double mean = 0.0;
  for (double s : st.spacings) mean += s;
  mean /= static_cast<double>(st.spacings.size());
  if (!(mean > 0.0)) throw std::invalid_argument("level_spacing_statistics: spectrum is fully degenerate");
  st.mean_spacing = mean;
  for (double& s : st.spacings) s /= mean;

  const auto bins = static_cast<std::size_t>(std::ceil(s_max / bin_width));
  st.density.assign(bins, 0.0);
  for (double s : st.spacings) {
    const auto b = static_cast<std::size_t>(s / bin_width);
    if (b < bins) st.density[b] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(st.spacings.size()) * bin_width);
  for (std::size_t b = 0; b < bins; ++b) {
    const double c = (b + 0.5) * bin_width;
    st.bin_centers.push_back(c);
    st.density[b] *= norm;
    st.poisson.push_back(std::exp(-c));
    st.wigner.push_back(0.5 * kPi * c * std::exp(-kPi * c * c / 4.0));
  }

  std::vector<double> sorted = st.spacings;
  std::sort(sorted.begin(), sorted.end());
  st.ks_poisson = ks_distance(sorted, poisson_cdf);
  st.ks_wigner = ks_distance(sorted, wigner_cdf);
  return st;
}

LevelStatistics level_spacing_statistics(const Eigensystem& eig, double edge_fraction) {
  if (eig.kind != Eigensystem::Kind::Hermitian)
    throw std::invalid_argument("level_spacing_statistics: expects a Hermitian spectrum");
  return level_spacing_statistics(std::span<const double>(eig.values.data(), eig.size()), edge_fraction);
}

std::vector<std::uint64_t> localized_initial_states(const SpinChainParams& params) {
  params.validate();
  std::vector<std::uint64_t> out;
  if (params.n_up == 0) return {0};
  const std::uint64_t block = (1ull << params.n_up) - 1;
  for (int first = 0; first + params.n_up <= params.n_sites; ++first) out.push_back(block << first);
  return out;
}

SpinChaosResult spin_chaos_measure(const SpinChainParams& params, std::shared_ptr<const Eigensystem> eig,
                                   unsigned threads) {
  params.validate();
  const auto basis = spin_configurations(params.n_sites, params.n_up);
  if (!eig) eig = std::make_shared<const Eigensystem>(diagonalize(build_xxz_hamiltonian(params)));
  if (eig->size() != basis.size()) throw std::invalid_argument("spin_chaos_measure: eigensystem dimension mismatch");

  const MetricSpace space = occupied_positions_metric(basis, params.n_sites);
  const auto labels = LabeledBasis::computational(space);
  const DiagonalEnsembleProjector projector(eig, labels);

  SpinChaosResult out;
  out.states = localized_initial_states(params);
  out.upsilon.assign(out.states.size(), 0.0);
  parallel_for(out.states.size(), threads, [&](std::size_t k) {
    const auto at = std::lower_bound(basis.begin(), basis.end(), out.states[k]) - basis.begin();
    const auto psi = StateVector::basis_state(basis.size(), static_cast<std::size_t>(at));
    out.upsilon[k] = chaos_measure(projector, psi, space).upsilon;
  });
  return out;
}

}  // namespace qdist
