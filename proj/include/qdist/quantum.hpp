#pragma once

// States, measurement bases with a metric, and the distances between states
// that follow from them.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "qdist/ot.hpp"
#include "qdist/types.hpp"

namespace qdist {

/// Normalised pure state (sum |amplitude|^2 = 1 within 1e-9).
class StateVector {
 public:
  static constexpr double kNormTolerance = 1e-9;

  StateVector() = default;
  static StateVector from_amplitudes(CVector amplitudes);
  /// Divides by the norm; throws on a zero vector.
  static StateVector normalized(CVector amplitudes);
  static StateVector basis_state(std::size_t dim, std::size_t index);

  std::size_t size() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

 private:
  explicit StateVector(CVector a) : amps_(std::move(a)) {}
  CVector amps_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-9;

  DensityMatrix() = default;
  static DensityMatrix from_matrix(CMatrix rho);
  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t size() const { return static_cast<std::size_t>(rho_.rows()); }
  const CMatrix& matrix() const { return rho_; }

 private:
  explicit DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {}
  CMatrix rho_;
};

/// An orthonormal set {xi_i} with a metric over its labels.
///
/// The basis is represented by its analysis map psi -> (<xi_i|psi>)_i. Three
/// forms exist: the computational basis (identity), an explicit unitary whose
/// columns are the xi_i, and a caller-supplied isometry for bases that are
/// too large to store densely (the number of labels may exceed the state
/// dimension when states are embedded in a larger space).
class LabeledBasis {
 public:
  using Analysis = std::function<CVector(const CVector&)>;

  static LabeledBasis computational(MetricSpace space);
  /// Columns of `vectors` are the basis states; orthonormality is checked to 1e-8.
  static LabeledBasis from_unitary(CMatrix vectors, MetricSpace space);
  static LabeledBasis from_analysis(Analysis analysis, std::size_t state_dim, MetricSpace space);

  std::size_t size() const { return space_.size(); }
  std::size_t state_dim() const { return state_dim_; }
  const MetricSpace& space() const { return space_; }
  bool is_computational() const { return kind_ == Kind::Computational; }

  /// <xi_i|psi> for every label i.
  CVector coefficients(const CVector& psi) const;
  /// Column-wise coefficients.
  CMatrix coefficients(const CMatrix& columns) const;

 private:
  enum class Kind { Computational, Dense, Analytic };
  Kind kind_ = Kind::Computational;
  std::size_t state_dim_ = 0;
  MetricSpace space_;
  std::shared_ptr<const CMatrix> vectors_;
  Analysis analysis_;
};

/// p_i = |<xi_i|psi>|^2.
Distribution project_probabilities(const StateVector& psi, const LabeledBasis& basis);
/// p_i = <xi_i|rho|xi_i>.
Distribution project_probabilities_mixed(const DensityMatrix& rho, const LabeledBasis& basis);

/// Wasserstein distance between the two states' distributions on `basis`.
double physical_distance(const StateVector& a, const StateVector& b, const LabeledBasis& basis,
                         const DistanceConfig& cfg = {});

/// sqrt(1 - |<a|b>|^2): 0 for equal rays, 1 for orthogonal states.
double fubini_study(const StateVector& a, const StateVector& b);

/// Gaussian packet parameters; `sigma` is the position standard deviation.
struct GaussianPacket {
  double center_x = 0.0;
  double center_p = 0.0;
  double sigma = 1.0;
};

/// Sample points of a one-dimensional position grid, optionally periodic.
struct PositionGrid {
  std::vector<double> points;
  std::optional<double> period;

  static PositionGrid periodic(std::size_t n, double period);
  static PositionGrid line(std::size_t n, double lo, double hi);
  double spacing() const;
};

/// Discretised packet exp(-(x-x0)^2/(4 sigma^2) + i p0 (x-x0)/hbar),
/// renormalised on the grid. On a periodic grid x - x0 is the minimal-image
/// displacement.
StateVector gaussian_packet_state(const GaussianPacket& packet, const PositionGrid& grid, double hbar);

}  // namespace qdist
