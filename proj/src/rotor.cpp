#include "qdist/rotor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qdist/metrics.hpp"
#include "qdist/parallel.hpp"

namespace qdist {
namespace {

double wrap(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double circular_mean(const std::vector<double>& weights, double step) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * std::polar(1.0, step * static_cast<double>(i));
  return wrap(std::arg(s));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void RotorParams::validate() const {
  if (!(K >= 0.0) || !std::isfinite(K)) throw std::invalid_argument("RotorParams: K must be finite and >= 0");
  if (m < 4) throw std::invalid_argument("RotorParams: m must be >= 4");
  if (m > 100) throw ResourceError("RotorParams: m too large for dense Floquet matrices");
}

ClassicalPoint standard_map_step(const ClassicalPoint& pt, double K) {
  const double p = wrap(pt.p + K * std::sin(pt.q));
  return {wrap(pt.q + p), p};
}

double torus_distance(const ClassicalPoint& a, const ClassicalPoint& b) {
  auto d = [](double x, double y) {
    const double r = std::fmod(std::abs(x - y), kTwoPi);
    return std::min(r, kTwoPi - r);
  };
  return std::hypot(d(a.q, b.q), d(a.p, b.p));
}

double finite_time_lyapunov(const ClassicalPoint& start, double K, int steps) {
  if (steps < 1) throw std::invalid_argument("finite_time_lyapunov: steps must be positive");
  ClassicalPoint x = start;
  double dq = 1.0, dp = 0.0, log_growth = 0.0;
  for (int i = 0; i < steps; ++i) {
    // Jacobian of (q, p) -> (q + p + K sin q, p + K sin q).
    const double c = K * std::cos(x.q);
    const double np = c * dq + dp;
    const double nq = dq + np;
    const double norm = std::hypot(nq, np);
    log_growth += std::log(norm);
    dq = nq / norm;
    dp = np / norm;
    x = standard_map_step(x, K);
  }
  return log_growth / steps;
}

RotorFloquet::RotorFloquet(const RotorParams& params) : params_(params) {
  params_.validate();
  const int dim = params_.dim();
  const double hbar = params_.hbar();
  kick_.resize(dim);
  kinetic_.resize(dim);
  for (int n = 0; n < dim; ++n) {
    const double x = kTwoPi * n / dim;
    kick_(n) = std::polar(1.0, -params_.K * std::cos(x) / hbar);
  }
  for (int k = 0; k < dim; ++k) {
    const int ks = 2 * k <= dim ? k : k - dim;  // p in (-pi, pi]
    const double p = hbar * ks;
    kinetic_(k) = std::polar(1.0, -p * p / (2.0 * hbar));
  }
  CMatrix f(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int n = 0; n < dim; ++n)
    for (int k = 0; k < dim; ++k)
      f(n, k) = norm * std::polar(1.0, kTwoPi * static_cast<double>((static_cast<long>(k) * n) % dim) / dim);
  fourier_ = std::make_shared<const CMatrix>(std::move(f));
}

CVector RotorFloquet::to_momentum(const CVector& psi) const { return fourier_->adjoint() * psi; }

StateVector RotorFloquet::step(const StateVector& psi) const {
  if (psi.size() != static_cast<std::size_t>(params_.dim())) throw std::invalid_argument("floquet_step: dimension mismatch");
  CVector c = fourier_->adjoint() * kick_.cwiseProduct(psi.amplitudes());
  c = c.cwiseProduct(kinetic_);
  return StateVector::from_amplitudes(*fourier_ * c);
}

CMatrix RotorFloquet::matrix() const {
  const CMatrix& f = *fourier_;
  return f * kinetic_.asDiagonal() * f.adjoint() * kick_.asDiagonal();
}

StateVector floquet_step(const StateVector& state, const RotorParams& params) { return RotorFloquet(params).step(state); }

StateVector rotor_packet(const RotorParams& params, const ClassicalPoint& at) {
  params.validate();
  const auto grid = PositionGrid::periodic(static_cast<std::size_t>(params.dim()), kTwoPi);
  return gaussian_packet_state({wrap(at.q), wrap(at.p), std::sqrt(params.hbar() / 2.0)}, grid, params.hbar());
}

ClassicalPoint rotor_expectation(const RotorFloquet& floquet, const StateVector& psi) {
  const int dim = floquet.params().dim();
  std::vector<double> px(dim), pk(dim);
  const CVector mom = floquet.to_momentum(psi.amplitudes());
  for (int i = 0; i < dim; ++i) {
    px[i] = std::norm(psi[static_cast<std::size_t>(i)]);
    pk[i] = std::norm(mom(i));
  }
  const double step = kTwoPi / dim;
  return {circular_mean(px, step), circular_mean(pk, step)};
}

LabeledBasis rotor_cell_basis(const RotorParams& params) {
  params.validate();
  const auto cells = rotor_wannier_basis(params.m);
  std::vector<std::vector<double>> centers;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto c = rotor_cell_center(params.m, i);
    centers.push_back({c.x, c.p});
  }
  const std::vector<std::optional<double>> periods{kTwoPi, kTwoPi};
  return LabeledBasis::from_unitary(cells.factor(), torus_product_metric(centers, periods));
}

ClassicalPoint neighbour_start(const RotorParams& params, const ClassicalPoint& start) {
  const double cell = kTwoPi / params.m;
  return {wrap(start.q + cell), wrap(start.p + cell)};
}

ThreeDistanceSeries three_distance_experiment(const RotorParams& params, const ClassicalPoint& start1,
                                              const ClassicalPoint& start2, int n_kicks, const DistanceConfig& cfg) {
  if (n_kicks < 0) throw std::invalid_argument("three_distance_experiment: n_kicks must be >= 0");
  for (const auto& s : {start1, start2})
    if (!(s.q >= 0.0 && s.q < kTwoPi && s.p >= 0.0 && s.p < kTwoPi))
      throw std::invalid_argument("three_distance_experiment: starts must lie in [0, 2 pi)^2");
  cfg.validate();
  const RotorFloquet floquet(params);
  const LabeledBasis basis = rotor_cell_basis(params);

  ThreeDistanceSeries out;
  ClassicalPoint c1 = start1, c2 = start2;
  StateVector psi1 = rotor_packet(params, start1), psi2 = rotor_packet(params, start2);
  for (int t = 0; t <= n_kicks; ++t) {
    if (t > 0) {
      c1 = standard_map_step(c1, params.K);
      c2 = standard_map_step(c2, params.K);
      psi1 = floquet.step(psi1);
      psi2 = floquet.step(psi2);
    }
    out.kick.push_back(t);
    out.classical.push_back(torus_distance(c1, c2));
    out.physical.push_back(physical_distance(psi1, psi2, basis, cfg));
    out.expectation.push_back(torus_distance(rotor_expectation(floquet, psi1), rotor_expectation(floquet, psi2)));
    out.overlap.push_back(std::abs(psi1.amplitudes().dot(psi2.amplitudes())));
  }
  return out;
}

ChaosScanResult chaos_scan(const RotorParams& params, const RotorScanOptions& options) {
  params.validate();
  options.cfg.validate();
  if (params.dim() > options.max_dim) throw ResourceError("chaos_scan: Floquet dimension exceeds max_dim");
  const RotorFloquet floquet(params);
  const LabeledBasis basis = rotor_cell_basis(params);
  auto eig = std::make_shared<const Eigensystem>(diagonalize_unitary(floquet.matrix()));
  const DiagonalEnsembleProjector projector(eig, basis);

  const int m = params.m;
  std::vector<double> xs(m), ys(m);
  for (int i = 0; i < m; ++i) {
    xs[i] = rotor_cell_center(m, static_cast<std::size_t>(i)).x;
    ys[i] = rotor_cell_center(m, static_cast<std::size_t>(i * m)).p;
  }
  ChaosScanResult result(xs, ys);
  parallel_for(static_cast<std::size_t>(m) * m, options.threads, [&](std::size_t idx) {
    const auto c = rotor_cell_center(m, idx);
    const auto psi = rotor_packet(params, {c.x, c.p});
    result.values[idx] = chaos_measure(projector, psi, basis.space(), std::nullopt, options.cfg).upsilon;
  });
  result.metadata["model"] = "kicked-rotor";
  result.metadata["K"] = fmt(params.K);
  result.metadata["m"] = std::to_string(m);
  result.metadata["hbar_eff"] = fmt(params.hbar());
  result.metadata["lambda"] = std::to_string(options.cfg.order);
  result.metadata["reference"] = "uniform";
  result.metadata["x"] = "position cell centre X";
  result.metadata["y"] = "momentum cell centre P";
  return result;
}

std::vector<double> rotor_spreading_series(const RotorParams& params, const ClassicalPoint& start, int n_kicks) {
  if (n_kicks < 0) throw std::invalid_argument("rotor_spreading_series: n_kicks must be >= 0");
  const RotorFloquet floquet(params);
  const LabeledBasis basis = rotor_cell_basis(params);
  const auto uniform = Distribution::uniform(basis.size());
  std::vector<double> out;
  StateVector psi = rotor_packet(params, start);
  for (int t = 0; t <= n_kicks; ++t) {
    if (t > 0) psi = floquet.step(psi);
    out.push_back(wasserstein(uniform, project_probabilities(psi, basis), basis.space()));
  }
  return out;
}

}  // namespace qdist
