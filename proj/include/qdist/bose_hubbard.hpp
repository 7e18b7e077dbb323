#pragma once

// Three-site Bose-Hubbard model
//   H = -(c0/2) sum_{i != j} a_i^+ a_j + (c / 2N) sum_j a_j^+ a_j^+ a_j a_j
// and its mean-field limit over amplitudes (a1, a2, a3) with unit norm.
//
// Fock states |N1, N2, N3> are ordered by N1, then N2 (N3 = N - N1 - N2).
// The extended space of the phase-cell basis has index N1 * L^2 + N2.

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qdist/chaos.hpp"
#include "qdist/eigensystem.hpp"
#include "qdist/ot.hpp"
#include "qdist/phase_basis.hpp"
#include "qdist/quantum.hpp"

namespace qdist {

struct BHParams {
  double c0 = 1.0;
  double c = 2.0;
  int N = 35;

  void validate() const;
  /// L with N = L^2 - 1; throws if N is not of that form.
  int resolution() const;
  static BHParams for_resolution(int L, double c0 = 1.0, double c = 2.0);
};

struct FockState {
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;
};

/// All |N1, N2, N3> with N1 + N2 + N3 = N; (N + 1)(N + 2) / 2 states.
std::vector<FockState> fock_states(int N);
/// Position of |n1, n2, N - n1 - n2> in fock_states(N).
std::size_t fock_index(int N, int n1, int n2);

/// Real symmetric Hamiltonian on fock_states(params.N).
Matrix build_bh_hamiltonian(const BHParams& params);

struct MeanFieldState {
  std::array<Complex, 3> a{};

  /// Checks |a1|^2 + |a2|^2 + |a3|^2 = 1 to 1e-10.
  static MeanFieldState from_amplitudes(const std::array<Complex, 3>& a);
  double n(int i) const { return std::norm(a[static_cast<std::size_t>(i)]); }
  /// arg a_i - arg a_3.
  double theta(int i) const;
};

/// H_mf = -(c0/2) sum_{i != j} a_i^* a_j + (c/2) sum_j |a_j|^4.
double meanfield_energy(const MeanFieldState& s, const BHParams& params);
/// da/dt from i da_j/dt = -(c0/2) sum_{k != j} a_k + c |a_j|^2 a_j.
std::array<Complex, 3> meanfield_rhs(const std::array<Complex, 3>& a, const BHParams& params);
/// One classical fourth-order Runge-Kutta step of length dt.
std::array<Complex, 3> meanfield_rk4_step(const std::array<Complex, 3>& a, const BHParams& params, double dt);

struct MeanFieldTrajectory {
  std::vector<double> times;
  std::vector<MeanFieldState> states;
  double norm_drift = 0.0;
  double energy_drift = 0.0;
};

/// Fixed-step integration over [0, t_end], recording every `record_every`
/// steps (and the final state). Throws ConvergenceError if the norm drifts by
/// more than 1e-9 or the energy by more than 1e-8 |E| per unit time.
MeanFieldTrajectory meanfield_flow(const MeanFieldState& start, const BHParams& params, double t_end,
                                   double dt = 1e-3, int record_every = 1);

/// |Psi> = (N!)^{-1/2} (sum_i a_i a_i^+)^N |0> on fock_states(N).
StateVector coherent_state(const MeanFieldState& a, int N);

/// Fock-space vector placed in the L^4-dimensional extended space.
CVector embed_extended(const CVector& fock, int L);

struct SectionSpec {
  double energy = 0.8;      // in units of c0
  double n2_plane = 0.2475;
  int direction = 1;        // sign of dn2/dt at a crossing

  void validate() const;
};

/// State on the section plane with n1, theta1 given, arg a3 = 0 and theta2
/// solved from H_mf = E on the branch with the requested sign of dn2/dt.
/// nullopt when the point is not reachable.
std::optional<MeanFieldState> lift_section_point(const SectionSpec& spec, const BHParams& params, double n1,
                                                 double theta1);

/// Root of g in [lo, hi] by bisection; g(lo) and g(hi) must differ in sign.
double bisect_root(const std::function<double(double)>& g, double lo, double hi, double tol = 1e-13);

/// Times where g crosses zero in direction sign(direction), sampling g on a
/// grid of step dt over [t0, t1] and refining by bisection.
std::vector<double> detect_crossings(const std::function<double(double)>& g, double t0, double t1, double dt,
                                     int direction);

struct SectionPoint {
  double n1 = 0.0;
  double theta1 = 0.0;  // in [0, 2 pi)
  double time = 0.0;
};

struct SectionOrbit {
  double seed_n1 = 0.0;
  double seed_theta1 = 0.0;
  bool reachable = false;
  std::vector<SectionPoint> points;
};

struct SectionOptions {
  double t_max = 500.0;  // in units of 1 / c0
  double dt = 1e-3;
  unsigned threads = 1;
};

/// Crossings of n2 = plane in the requested direction, located to
/// |n2 - plane| < 1e-8. Throws ConvergenceError if a reachable seed never
/// crosses within t_max.
SectionOrbit section_orbit(const SectionSpec& spec, const BHParams& params, double n1, double theta1,
                           const SectionOptions& opt = {});
std::vector<SectionOrbit> poincare_section(const SectionSpec& spec, const BHParams& params,
                                           const std::vector<std::array<double, 2>>& seeds,
                                           const SectionOptions& opt = {});

/// sqrt(var n1 + s^2) with s the circular standard deviation of theta1 / 2 pi.
double point_set_dispersion(const std::vector<SectionPoint>& points);

/// Quantum model at N = L^2 - 1 with its eigensystem and phase-cell basis.
class BoseHubbardModel {
 public:
  explicit BoseHubbardModel(const BHParams& params);

  const BHParams& params() const { return params_; }
  int resolution() const { return L_; }
  std::size_t fock_dim() const { return fock_dim_; }
  /// L^4 cells, column order of build_phase_lattice_2d.
  std::size_t cells() const { return basis_.size(); }
  const Eigensystem& eigensystem() const { return *eig_; }
  const LabeledBasis& basis() const { return basis_; }
  const DiagonalEnsembleProjector& projector() const { return *projector_; }
  /// (l1, t1, l2, t2) of a cell.
  std::array<int, 4> cell_coordinates(std::size_t index) const;
  /// Cell nearest to the mean-field point (cell containing N n_i and L theta_i / 2 pi).
  std::size_t cell_of(const MeanFieldState& s) const;

  StateVector coherent(const MeanFieldState& s) const { return coherent_state(s, params_.N); }
  /// Squared norm of each cell vector's physical part.
  const Vector& physical_weight() const { return physical_weight_; }
  /// <H> in each cell's normalised physical part (NaN for unphysical cells).
  const Vector& cell_energy() const { return cell_energy_; }

 private:
  BHParams params_;
  int L_ = 0;
  std::size_t fock_dim_ = 0;
  PhaseCellBasis lattice_;
  LabeledBasis basis_;
  std::shared_ptr<const Eigensystem> eig_;
  std::unique_ptr<DiagonalEnsembleProjector> projector_;
  Vector physical_weight_;
  Vector cell_energy_;
};

/// 4-D cell metric d = (1/L) sqrt(sum_i dl_i^2 + dt_i^2) with dt_i periodic mod L.
MetricSpace bh_cell_metric(int L, const std::vector<std::size_t>& cells = {});

struct EnergyShellOptions {
  int smoothing_window = 5;  // levels
  double sigma_cut = 3.0;
  double min_r2 = 0.95;
};

struct EnergyShell {
  /// Gaussian A exp(-(E - mu)^2 / (2 sigma^2)) fitted to the smoothed envelope.
  double amplitude = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double r2 = 0.0;
  /// Mean weight of the input packets inside the selected cells.
  double captured_fraction = 0.0;
  std::size_t packets = 0;
  /// Cells with energy within mu +- sigma_cut sigma, ascending.
  std::vector<std::size_t> cells;
  /// Ergodic reference over `cells`.
  Distribution reference;
  MetricSpace space;
  /// Level energies and the smoothed mean spectral weight.
  std::vector<double> energies;
  std::vector<double> envelope;
};

/// Energy-shell reference from the spectral envelope of `packets`.
/// rho_erg = sum_k g(E_k) |E_k><E_k| / sum_k g(E_k) with g the fitted
/// Gaussian; its cell distribution restricted to the selected cells.
/// Throws ConvergenceError if the fit fails or R^2 < min_r2.
EnergyShell energy_shell_reference(const BoseHubbardModel& model, const std::vector<StateVector>& packets,
                                   const EnergyShellOptions& opt = {});

/// Upsilon of one coherent packet against the shell: both distributions
/// restricted to the shell cells and renormalised.
double bh_upsilon(const BoseHubbardModel& model, const EnergyShell& shell, const StateVector& packet,
                  const DistanceConfig& cfg = {});

struct BHGrid {
  double step = 0.0;
  std::vector<double> n1;      // columns
  std::vector<double> theta1;  // rows
};
/// n1 = (i + 1/2) step for i < 1/step, theta1 = 2 pi (j + 1/2) step.
BHGrid bh_section_grid(double step);

struct BHChaosOptions {
  double grid_step = 0.0;  // 0: 1 / (3 L)
  unsigned threads = 1;
  DistanceConfig cfg;
  EnergyShellOptions shell;
};

struct BHChaosMap {
  ChaosScanResult scan;  // rows = theta1, columns = n1
  EnergyShell shell;
};

/// Upsilon over the section grid. Unreachable points are missing.
BHChaosMap bh_chaos_map(const BoseHubbardModel& model, const SectionSpec& spec, const BHChaosOptions& opt = {});

/// Coherent packets of the reachable points of `grid`.
std::vector<StateVector> bh_grid_packets(const BoseHubbardModel& model, const SectionSpec& spec, const BHGrid& grid);

}  // namespace qdist
