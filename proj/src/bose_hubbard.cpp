#include "qdist/bose_hubbard.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qdist/metrics.hpp"
#include "qdist/parallel.hpp"

namespace qdist {
namespace {

constexpr std::size_t kMaxFockDim = 12000;
constexpr int kMaxResolution = 10;

using Amps = std::array<Complex, 3>;

double wrap(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double norm2(const Amps& a) { return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Levenberg-Marquardt for y = A exp(-(x - mu)^2 / (2 s^2)).
bool fit_gaussian(const std::vector<double>& x, const std::vector<double>& y, double& amp, double& mu, double& s) {
  auto sse = [&](double a, double m, double sd) {
    double r = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double e = y[k] - a * std::exp(-(x[k] - m) * (x[k] - m) / (2 * sd * sd));
      r += e * e;
    }
    return r;
  };
  double lambda = 1e-3;
  double cur = sse(amp, mu, s);
  for (int it = 0; it < 500; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double u = (x[k] - mu) / s;
      const double g = std::exp(-0.5 * u * u);
      const Eigen::Vector3d j(g, amp * g * u / s, amp * g * u * u / s);
      const double r = y[k] - amp * g;
      jtj += j * j.transpose();
      jtr += j * r;
    }
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      Eigen::Matrix3d a = jtj;
      a.diagonal() *= 1.0 + lambda;
      const Eigen::Vector3d d = a.ldlt().solve(jtr);
      const double na = amp + d(0), nm = mu + d(1), ns = std::abs(s + d(2));
      const double next = d.allFinite() && ns > 0.0 ? sse(na, nm, ns) : INFINITY;
      if (next < cur) {
        const double gain = cur - next;
        amp = na;
        mu = nm;
        s = ns;
        cur = next;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (gain <= 1e-14 * std::max(cur, 1e-300)) return true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) return std::isfinite(cur);
  }
  return std::isfinite(cur);
}

}  // namespace

void BHParams::validate() const {
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw std::invalid_argument("BHParams: c0 must be positive");
  if (!std::isfinite(c)) throw std::invalid_argument("BHParams: c must be finite");
  if (N < 1) throw std::invalid_argument("BHParams: N must be >= 1");
  const auto dim = static_cast<std::size_t>(N + 1) * static_cast<std::size_t>(N + 2) / 2;
  if (dim > kMaxFockDim) throw ResourceError("BHParams: Fock dimension exceeds " + std::to_string(kMaxFockDim));
}

int BHParams::resolution() const {
  const int L = static_cast<int>(std::lround(std::sqrt(static_cast<double>(N + 1))));
  if (L * L - 1 != N) throw std::invalid_argument("BHParams: N must equal L^2 - 1");
  return L;
}

BHParams BHParams::for_resolution(int L, double c0, double c) {
  if (L < 2) throw std::invalid_argument("BHParams: L must be >= 2");
  return {c0, c, L * L - 1};
}

std::vector<FockState> fock_states(int N) {
  if (N < 0) throw std::invalid_argument("fock_states: N must be >= 0");
  std::vector<FockState> out;
  out.reserve(static_cast<std::size_t>(N + 1) * (N + 2) / 2);
  for (int n1 = 0; n1 <= N; ++n1)
    for (int n2 = 0; n1 + n2 <= N; ++n2) out.push_back({n1, n2, N - n1 - n2});
  return out;
}

std::size_t fock_index(int N, int n1, int n2) {
  if (n1 < 0 || n2 < 0 || n1 + n2 > N) throw std::invalid_argument("fock_index: occupation out of range");
  // States before n1: sum_{k < n1} (N - k + 1).
  const auto k = static_cast<std::size_t>(n1);
  return k * static_cast<std::size_t>(N + 1) - k * (k - 1) / 2 + static_cast<std::size_t>(n2);
}

Matrix build_bh_hamiltonian(const BHParams& params) {
  params.validate();
  const int N = params.N;
  const auto states = fock_states(N);
  const auto dim = static_cast<Eigen::Index>(states.size());
  Matrix h = Matrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    const std::array<int, 3> n{states[s].n1, states[s].n2, states[s].n3};
    double diag = 0.0;
    for (int v : n) diag += static_cast<double>(v) * (v - 1);
    h(s, s) = params.c / (2.0 * N) * diag;
    // a_i^+ a_j for i != j.
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j || n[j] == 0) continue;
        std::array<int, 3> m = n;
        ++m[i];
        --m[j];
        const auto t = static_cast<Eigen::Index>(fock_index(N, m[0], m[1]));
        h(t, s) += -0.5 * params.c0 * std::sqrt(static_cast<double>(m[i]) * n[j]);
      }
  }
  return h;
}

MeanFieldState MeanFieldState::from_amplitudes(const std::array<Complex, 3>& a) {
  for (const auto& z : a)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::invalid_argument("MeanFieldState: non-finite amplitude");
  if (std::abs(norm2(a) - 1.0) > 1e-10) throw std::invalid_argument("MeanFieldState: amplitudes must have unit norm");
  return MeanFieldState{a};
}

double MeanFieldState::theta(int i) const {
  return wrap(std::arg(a[static_cast<std::size_t>(i)]) - std::arg(a[2]));
}

double meanfield_energy(const MeanFieldState& s, const BHParams& params) {
  double hop = 0.0, inter = 0.0;
  for (int i = 0; i < 3; ++i) {
    inter += s.n(i) * s.n(i);
    for (int j = i + 1; j < 3; ++j) hop += 2.0 * (std::conj(s.a[i]) * s.a[j]).real();
  }
  return -0.5 * params.c0 * hop + 0.5 * params.c * inter;
}

std::array<Complex, 3> meanfield_rhs(const std::array<Complex, 3>& a, const BHParams& params) {
  const Complex sum = a[0] + a[1] + a[2];
  const Complex minus_i(0.0, -1.0);
  Amps out;
  for (int j = 0; j < 3; ++j) out[j] = minus_i * (-0.5 * params.c0 * (sum - a[j]) + params.c * std::norm(a[j]) * a[j]);
  return out;
}

std::array<Complex, 3> meanfield_rk4_step(const std::array<Complex, 3>& a, const BHParams& params, double dt) {
  auto axpy = [](const Amps& x, double h, const Amps& k) {
    return Amps{x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]};
  };
  const Amps k1 = meanfield_rhs(a, params);
  const Amps k2 = meanfield_rhs(axpy(a, dt / 2, k1), params);
  const Amps k3 = meanfield_rhs(axpy(a, dt / 2, k2), params);
  const Amps k4 = meanfield_rhs(axpy(a, dt, k3), params);
  Amps out;
  for (int j = 0; j < 3; ++j) out[j] = a[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  return out;
}

namespace {

void check_drift(double norm_drift, double energy_drift, double e0, double t, const BHParams& params) {
  const double span = std::max(1.0, t);
  if (norm_drift > 1e-9 * span) throw ConvergenceError("meanfield_flow: norm drift exceeds 1e-9 per unit time");
  if (energy_drift > 1e-8 * std::max(std::abs(e0), params.c0) * span)
    throw ConvergenceError("meanfield_flow: energy drift exceeds 1e-8 |E| per unit time");
}

}  // namespace

MeanFieldTrajectory meanfield_flow(const MeanFieldState& start, const BHParams& params, double t_end, double dt,
                                   int record_every) {
  params.validate();
  if (!(t_end >= 0.0) || !(dt > 0.0) || record_every < 1)
    throw std::invalid_argument("meanfield_flow: need t_end >= 0, dt > 0, record_every >= 1");
  const auto checked = MeanFieldState::from_amplitudes(start.a);
  const double e0 = meanfield_energy(checked, params);
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  MeanFieldTrajectory out;
  out.times.push_back(0.0);
  out.states.push_back(checked);
  Amps a = checked.a;
  for (long k = 1; k <= steps; ++k) {
    const double h = std::min(dt, t_end - (k - 1) * dt);
    a = meanfield_rk4_step(a, params, h);
    const MeanFieldState s{a};
    out.norm_drift = std::max(out.norm_drift, std::abs(norm2(a) - 1.0));
    out.energy_drift = std::max(out.energy_drift, std::abs(meanfield_energy(s, params) - e0));
    if (k % record_every == 0 || k == steps) {
      out.times.push_back(k == steps ? t_end : k * dt);
      out.states.push_back(s);
    }
  }
  check_drift(out.norm_drift, out.energy_drift, e0, t_end, params);
  return out;
}

StateVector coherent_state(const MeanFieldState& s, int N) {
  if (N < 1) throw std::invalid_argument("coherent_state: N must be >= 1");
  const auto a = MeanFieldState::from_amplitudes(s.a);
  const auto states = fock_states(N);
  CVector psi(static_cast<Eigen::Index>(states.size()));
  const double log_nf = std::lgamma(N + 1.0);
  std::array<double, 3> log_mod{}, phase{};
  for (int i = 0; i < 3; ++i) {
    log_mod[i] = std::log(std::abs(a.a[i]));  // -inf for a zero mode
    phase[i] = std::arg(a.a[i]);
  }
  for (std::size_t k = 0; k < states.size(); ++k) {
    const std::array<int, 3> n{states[k].n1, states[k].n2, states[k].n3};
    double lg = 0.5 * log_nf, ph = 0.0;
    bool zero = false;
    for (int i = 0; i < 3; ++i) {
      if (n[i] == 0) continue;
      if (!std::isfinite(log_mod[i])) {
        zero = true;
        break;
      }
      lg += n[i] * log_mod[i] - 0.5 * std::lgamma(n[i] + 1.0);
      ph += n[i] * phase[i];
    }
    psi(static_cast<Eigen::Index>(k)) = zero ? Complex(0.0) : std::polar(std::exp(lg), ph);
  }
  return StateVector::from_amplitudes(psi);
}

CVector embed_extended(const CVector& fock, int L) {
  if (L < 2) throw std::invalid_argument("embed_extended: L must be >= 2");
  const int N = L * L - 1;
  const auto dim = static_cast<Eigen::Index>(N + 1) * (N + 2) / 2;
  if (fock.size() != dim) throw std::invalid_argument("embed_extended: vector is not on the N = L^2 - 1 Fock space");
  const Eigen::Index l2 = static_cast<Eigen::Index>(L) * L;
  CVector out = CVector::Zero(l2 * l2);
  Eigen::Index k = 0;
  for (int n1 = 0; n1 <= N; ++n1)
    for (int n2 = 0; n1 + n2 <= N; ++n2) out(n1 * l2 + n2) = fock(k++);
  return out;
}

void SectionSpec::validate() const {
  if (!(n2_plane > 0.0 && n2_plane < 1.0)) throw std::invalid_argument("SectionSpec: n2 plane must lie in (0, 1)");
  if (!std::isfinite(energy)) throw std::invalid_argument("SectionSpec: energy must be finite");
  if (direction != 1 && direction != -1) throw std::invalid_argument("SectionSpec: direction must be +1 or -1");
}

std::optional<MeanFieldState> lift_section_point(const SectionSpec& spec, const BHParams& params, double n1,
                                                 double theta1) {
  spec.validate();
  params.validate();
  const double n2 = spec.n2_plane, n3 = 1.0 - n1 - n2;
  if (!(n1 >= 0.0) || !(n3 >= 0.0) || !std::isfinite(theta1)) return std::nullopt;
  // E = -c0 [r12 cos(t2 - t1) + r13 cos t1 + r23 cos t2] + (c/2) sum n^2
  //   -> A cos t2 + B sin t2 = C.
  const double r12 = std::sqrt(n1 * n2), r13 = std::sqrt(n1 * n3), r23 = std::sqrt(n2 * n3);
  const double A = r12 * std::cos(theta1) + r23;
  const double B = r12 * std::sin(theta1);
  const double C = (0.5 * params.c * (n1 * n1 + n2 * n2 + n3 * n3) - spec.energy) / params.c0 - r13 * std::cos(theta1);
  const double R = std::hypot(A, B);
  if (R < 1e-14 || std::abs(C) > R) return std::nullopt;
  const double phi = std::atan2(B, A), delta = std::acos(std::clamp(C / R, -1.0, 1.0));
  for (double theta2 : {phi + delta, phi - delta}) {
    const Amps a{std::polar(std::sqrt(n1), theta1), std::polar(std::sqrt(n2), theta2), Complex(std::sqrt(n3), 0.0)};
    const Amps da = meanfield_rhs(a, params);
    const double n2dot = 2.0 * (std::conj(a[1]) * da[1]).real();
    if (n2dot * spec.direction > 0.0) return MeanFieldState::from_amplitudes(a);
  }
  return std::nullopt;
}

double bisect_root(const std::function<double(double)>& g, double lo, double hi, double tol) {
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo < 0.0) == (ghi < 0.0)) throw std::invalid_argument("bisect_root: no sign change on the bracket");
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> detect_crossings(const std::function<double(double)>& g, double t0, double t1, double dt,
                                     int direction) {
  if (!(dt > 0.0) || !(t1 > t0)) throw std::invalid_argument("detect_crossings: need dt > 0 and t1 > t0");
  std::vector<double> out;
  const auto steps = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9));
  double ta = t0, ga = g(t0);
  for (long k = 1; k <= steps; ++k) {
    const double tb = std::min(t1, t0 + k * dt), gb = g(tb);
    const bool up = ga < 0.0 && gb >= 0.0, down = ga > 0.0 && gb <= 0.0;
    if ((direction > 0 && up) || (direction < 0 && down)) out.push_back(bisect_root(g, ta, tb));
    ta = tb;
    ga = gb;
  }
  return out;
}

SectionOrbit section_orbit(const SectionSpec& spec, const BHParams& params, double n1, double theta1,
                           const SectionOptions& opt) {
  if (!(opt.t_max > 0.0) || !(opt.dt > 0.0)) throw std::invalid_argument("section_orbit: need t_max > 0 and dt > 0");
  SectionOrbit orbit;
  orbit.seed_n1 = n1;
  orbit.seed_theta1 = theta1;
  const auto start = lift_section_point(spec, params, n1, theta1);
  if (!start) return orbit;
  orbit.reachable = true;
  const double e0 = meanfield_energy(*start, params);
  auto plane = [&](const Amps& a) { return std::norm(a[1]) - spec.n2_plane; };
  auto record = [&](const Amps& a, double t) {
    const MeanFieldState s{a};
    orbit.points.push_back({s.n(0), s.theta(0), t});
  };
  record(start->a, 0.0);
  const auto steps = static_cast<long>(std::ceil(opt.t_max / opt.dt - 1e-9));
  Amps a = start->a;
  double ga = plane(a), norm_drift = 0.0, energy_drift = 0.0;
  for (long k = 1; k <= steps; ++k) {
    const Amps b = meanfield_rk4_step(a, params, opt.dt);
    const double gb = plane(b);
    const bool hit = spec.direction > 0 ? (ga < 0.0 && gb >= 0.0) : (ga > 0.0 && gb <= 0.0);
    if (hit) {
      const Amps from = a;
      const double h = bisect_root([&](double s) { return plane(meanfield_rk4_step(from, params, s)); }, 0.0, opt.dt,
                                   1e-15);
      const Amps c = meanfield_rk4_step(from, params, h);
      if (std::abs(plane(c)) >= 1e-8) throw ConvergenceError("section_orbit: crossing refinement failed");
      record(c, (k - 1) * opt.dt + h);
    }
    norm_drift = std::max(norm_drift, std::abs(norm2(b) - 1.0));
    if (k % 1000 == 0) energy_drift = std::max(energy_drift, std::abs(meanfield_energy({b}, params) - e0));
    a = b;
    ga = gb;
  }
  check_drift(norm_drift, energy_drift, e0, opt.t_max, params);
  if (orbit.points.size() < 2) throw ConvergenceError("section_orbit: no crossing within t_max");
  return orbit;
}

std::vector<SectionOrbit> poincare_section(const SectionSpec& spec, const BHParams& params,
                                           const std::vector<std::array<double, 2>>& seeds,
                                           const SectionOptions& opt) {
  std::vector<SectionOrbit> out(seeds.size());
  parallel_for(seeds.size(), opt.threads,
               [&](std::size_t i) { out[i] = section_orbit(spec, params, seeds[i][0], seeds[i][1], opt); });
  return out;
}

double point_set_dispersion(const std::vector<SectionPoint>& points) {
  if (points.size() < 2) throw std::invalid_argument("point_set_dispersion: need at least two points");
  double mean = 0.0;
  Complex z = 0.0;
  for (const auto& p : points) {
    mean += p.n1;
    z += std::polar(1.0, p.theta1);
  }
  const double n = static_cast<double>(points.size());
  mean /= n;
  double var = 0.0;
  for (const auto& p : points) var += (p.n1 - mean) * (p.n1 - mean);
  var /= n;
  const double r = std::min(1.0, std::abs(z) / n);
  const double circ = r > 0.0 ? std::sqrt(-2.0 * std::log(r)) / kTwoPi : INFINITY;
  return std::sqrt(var + circ * circ);
}

MetricSpace bh_cell_metric(int L, const std::vector<std::size_t>& cells) {
  if (L < 2) throw std::invalid_argument("bh_cell_metric: L must be >= 2");
  const std::size_t total = static_cast<std::size_t>(L) * L * L * L;
  std::vector<std::vector<double>> pts;
  auto add = [&](std::size_t idx) {
    if (idx >= total) throw std::invalid_argument("bh_cell_metric: cell index out of range");
    const auto l = static_cast<std::size_t>(L);
    pts.push_back({static_cast<double>(idx / (l * l * l)), static_cast<double>(idx / (l * l) % l),
                   static_cast<double>(idx / l % l), static_cast<double>(idx % l)});
  };
  if (cells.empty())
    for (std::size_t i = 0; i < total; ++i) add(i);
  else
    for (auto i : cells) add(i);
  const std::vector<std::optional<double>> periods{std::nullopt, static_cast<double>(L), std::nullopt,
                                                   static_cast<double>(L)};
  return torus_product_metric(pts, periods, 1.0 / L);
}

BoseHubbardModel::BoseHubbardModel(const BHParams& params) : params_(params) {
  params_.validate();
  L_ = params_.resolution();
  if (L_ > kMaxResolution) throw ResourceError("BoseHubbardModel: L above " + std::to_string(kMaxResolution));
  const Matrix h = build_bh_hamiltonian(params_);
  fock_dim_ = static_cast<std::size_t>(h.rows());
  eig_ = std::make_shared<const Eigensystem>(diagonalize(h));
  auto lattice = std::make_shared<const PhaseCellBasis>(build_phase_lattice_2d(L_));
  const int L = L_;
  basis_ = LabeledBasis::from_analysis([lattice, L](const CVector& v) { return lattice->analysis(embed_extended(v, L)); },
                                       fock_dim_, bh_cell_metric(L_));
  projector_ = std::make_unique<DiagonalEnsembleProjector>(eig_, basis_);
  const CMatrix& w = projector_->overlaps();
  const Matrix w2 = w.cwiseAbs2();
  physical_weight_ = w2.rowwise().sum();
  const Vector weighted = w2 * eig_->values;
  cell_energy_.resize(physical_weight_.size());
  for (Eigen::Index i = 0; i < physical_weight_.size(); ++i)
    cell_energy_(i) = physical_weight_(i) > 1e-12 ? weighted(i) / physical_weight_(i) : std::nan("");
}

std::array<int, 4> BoseHubbardModel::cell_coordinates(std::size_t index) const {
  if (index >= cells()) throw std::invalid_argument("cell_coordinates: index out of range");
  const auto l = static_cast<std::size_t>(L_);
  return {static_cast<int>(index / (l * l * l)), static_cast<int>(index / (l * l) % l), static_cast<int>(index / l % l),
          static_cast<int>(index % l)};
}

std::size_t BoseHubbardModel::cell_of(const MeanFieldState& s) const {
  std::array<int, 4> c{};
  for (int i = 0; i < 2; ++i) {
    c[2 * i] = std::clamp(static_cast<int>(params_.N * s.n(i) / L_), 0, L_ - 1);
    c[2 * i + 1] = static_cast<int>(std::lround(L_ * s.theta(i) / kTwoPi)) % L_;
  }
  const auto l = static_cast<std::size_t>(L_);
  return ((static_cast<std::size_t>(c[0]) * l + c[1]) * l + c[2]) * l + c[3];
}

EnergyShell energy_shell_reference(const BoseHubbardModel& model, const std::vector<StateVector>& packets,
                                   const EnergyShellOptions& opt) {
  if (packets.empty()) throw std::invalid_argument("energy_shell_reference: no packets");
  if (opt.smoothing_window < 1 || !(opt.sigma_cut > 0.0))
    throw std::invalid_argument("energy_shell_reference: bad smoothing window or cut");
  const Eigensystem& eig = model.eigensystem();
  const auto levels = static_cast<Eigen::Index>(eig.size());

  Vector spectral = Vector::Zero(levels);
  for (const auto& p : packets) {
    if (p.size() != model.fock_dim()) throw std::invalid_argument("energy_shell_reference: packet dimension mismatch");
    spectral += (eig.vectors.adjoint() * p.amplitudes()).cwiseAbs2();
  }
  spectral /= static_cast<double>(packets.size());

  EnergyShell shell;
  shell.packets = packets.size();
  shell.energies.assign(eig.values.data(), eig.values.data() + levels);
  shell.envelope.resize(static_cast<std::size_t>(levels));
  const Eigen::Index half = opt.smoothing_window / 2;
  for (Eigen::Index k = 0; k < levels; ++k) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, k - half);
    const Eigen::Index hi = std::min(levels - 1, lo + opt.smoothing_window - 1);
    shell.envelope[k] = spectral.segment(lo, hi - lo + 1).mean();
  }

  double total = 0.0, mu = 0.0, var = 0.0;
  for (Eigen::Index k = 0; k < levels; ++k) {
    total += shell.envelope[k];
    mu += shell.envelope[k] * shell.energies[k];
  }
  mu /= total;
  for (Eigen::Index k = 0; k < levels; ++k) var += shell.envelope[k] * std::pow(shell.energies[k] - mu, 2);
  double sigma = std::sqrt(var / total);
  double amp = *std::max_element(shell.envelope.begin(), shell.envelope.end());
  if (!fit_gaussian(shell.energies, shell.envelope, amp, mu, sigma) || !(sigma > 0.0) || !(amp > 0.0))
    throw ConvergenceError("energy_shell_reference: Gaussian fit failed");
  shell.amplitude = amp;
  shell.mu = mu;
  shell.sigma = sigma;

  double mean_y = 0.0;
  for (double y : shell.envelope) mean_y += y;
  mean_y /= static_cast<double>(levels);
  double ss_res = 0.0, ss_tot = 0.0;
  for (Eigen::Index k = 0; k < levels; ++k) {
    const double f = amp * std::exp(-std::pow(shell.energies[k] - mu, 2) / (2 * sigma * sigma));
    ss_res += std::pow(shell.envelope[k] - f, 2);
    ss_tot += std::pow(shell.envelope[k] - mean_y, 2);
  }
  shell.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  if (shell.r2 < opt.min_r2)
    throw ConvergenceError("energy_shell_reference: Gaussian fit R^2 = " + fmt(shell.r2) + " below " +
                           fmt(opt.min_r2));

  const Vector& energy = model.cell_energy();
  for (std::size_t i = 0; i < model.cells(); ++i) {
    const double e = energy(static_cast<Eigen::Index>(i));
    if (std::isfinite(e) && std::abs(e - mu) <= opt.sigma_cut * sigma) shell.cells.push_back(i);
  }
  if (shell.cells.empty()) throw ConvergenceError("energy_shell_reference: no cell inside the shell");

  Vector g(levels);
  for (Eigen::Index k = 0; k < levels; ++k) g(k) = std::exp(-std::pow(eig.values(k) - mu, 2) / (2 * sigma * sigma));
  g /= g.sum();
  const CMatrix& w = model.projector().overlaps();
  std::vector<double> ref;
  ref.reserve(shell.cells.size());
  for (auto i : shell.cells) ref.push_back(w.row(static_cast<Eigen::Index>(i)).cwiseAbs2().dot(g));
  shell.reference = Distribution::normalized(std::move(ref));
  shell.space = bh_cell_metric(model.resolution(), shell.cells);

  double captured = 0.0;
  for (const auto& p : packets) {
    const CVector c = model.basis().coefficients(p.amplitudes());
    for (auto i : shell.cells) captured += std::norm(c(static_cast<Eigen::Index>(i)));
  }
  shell.captured_fraction = captured / static_cast<double>(packets.size());
  return shell;
}

double bh_upsilon(const BoseHubbardModel& model, const EnergyShell& shell, const StateVector& packet,
                  const DistanceConfig& cfg) {
  const Distribution full = model.projector().distribution(packet);
  std::vector<double> w;
  w.reserve(shell.cells.size());
  double inside = 0.0;
  for (auto i : shell.cells) inside += w.emplace_back(full[i]);
  if (!(inside > 1e-12)) throw ConvergenceError("bh_upsilon: packet has no long-time weight inside the shell");
  return wasserstein(shell.reference, Distribution::normalized(std::move(w)), shell.space, cfg);
}

BHGrid bh_section_grid(double step) {
  if (!(step > 0.0 && step <= 0.5)) throw std::invalid_argument("bh_section_grid: step must lie in (0, 1/2]");
  BHGrid g;
  g.step = step;
  const auto n = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
  for (std::size_t i = 0; i < n; ++i) {
    g.n1.push_back((static_cast<double>(i) + 0.5) * step);
    g.theta1.push_back(kTwoPi * (static_cast<double>(i) + 0.5) * step);
  }
  return g;
}

std::vector<StateVector> bh_grid_packets(const BoseHubbardModel& model, const SectionSpec& spec, const BHGrid& grid) {
  std::vector<StateVector> out;
  for (double t : grid.theta1)
    for (double n1 : grid.n1)
      if (const auto s = lift_section_point(spec, model.params(), n1, t)) out.push_back(model.coherent(*s));
  return out;
}

BHChaosMap bh_chaos_map(const BoseHubbardModel& model, const SectionSpec& spec, const BHChaosOptions& opt) {
  spec.validate();
  opt.cfg.validate();
  const int L = model.resolution();
  const double step = opt.grid_step > 0.0 ? opt.grid_step : 1.0 / (3.0 * L);
  const BHGrid grid = bh_section_grid(step);

  BHChaosMap out;
  out.shell = energy_shell_reference(model, bh_grid_packets(model, spec, grid), opt.shell);
  out.scan = ChaosScanResult(grid.n1, grid.theta1);
  const std::size_t cols = grid.n1.size();
  parallel_for(out.scan.values.size(), opt.threads, [&](std::size_t idx) {
    const auto s = lift_section_point(spec, model.params(), grid.n1[idx % cols], grid.theta1[idx / cols]);
    if (s) out.scan.values[idx] = bh_upsilon(model, out.shell, model.coherent(*s), opt.cfg);
  });

  auto& md = out.scan.metadata;
  md["model"] = "bose-hubbard";
  md["c0"] = fmt(model.params().c0);
  md["c"] = fmt(model.params().c);
  md["N"] = std::to_string(model.params().N);
  md["L"] = std::to_string(L);
  md["E"] = fmt(spec.energy);
  md["n2_plane"] = fmt(spec.n2_plane);
  md["direction"] = std::to_string(spec.direction);
  md["grid_step"] = fmt(step);
  md["lambda"] = std::to_string(opt.cfg.order);
  md["x"] = "n1";
  md["y"] = "theta1";
  md["reference"] = "energy shell";
  md["smoothing_window_levels"] = std::to_string(opt.shell.smoothing_window);
  md["shell_mu"] = fmt(out.shell.mu);
  md["shell_sigma"] = fmt(out.shell.sigma);
  md["shell_amplitude"] = fmt(out.shell.amplitude);
  md["shell_r2"] = fmt(out.shell.r2);
  md["shell_sigma_cut"] = fmt(opt.shell.sigma_cut);
  md["shell_cells"] = std::to_string(out.shell.cells.size());
  md["shell_packets"] = std::to_string(out.shell.packets);
  md["captured_fraction"] = fmt(out.shell.captured_fraction);
  return out;
}

}  // namespace qdist
