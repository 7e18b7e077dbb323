#include "qdist/quantum.hpp"

#include <cmath>
#include <stdexcept>

namespace qdist {
namespace {

void require_dim(std::size_t got, std::size_t want, const char* where) {
  if (got != want) throw std::invalid_argument(std::string(where) + ": dimension mismatch");
}

double wrap_signed(double delta, double period) {
  double d = std::fmod(delta, period);
  if (d > 0.5 * period) d -= period;
  if (d <= -0.5 * period) d += period;
  return d;
}

}  // namespace

StateVector StateVector::from_amplitudes(CVector amplitudes) {
  if (amplitudes.size() == 0) throw std::invalid_argument("StateVector: empty");
  if (!amplitudes.allFinite()) throw std::invalid_argument("StateVector: non-finite amplitude");
  if (std::abs(amplitudes.squaredNorm() - 1.0) > kNormTolerance)
    throw std::invalid_argument("StateVector: not normalised");
  return StateVector(std::move(amplitudes));
}

StateVector StateVector::normalized(CVector amplitudes) {
  if (amplitudes.size() == 0) throw std::invalid_argument("StateVector: empty");
  if (!amplitudes.allFinite()) throw std::invalid_argument("StateVector: non-finite amplitude");
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw std::invalid_argument("StateVector: zero vector");
  amplitudes /= n;
  return StateVector(std::move(amplitudes));
}

StateVector StateVector::basis_state(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::invalid_argument("StateVector::basis_state: index out of range");
  CVector a = CVector::Zero(static_cast<Eigen::Index>(dim));
  a(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(a));
}

DensityMatrix DensityMatrix::from_matrix(CMatrix rho) {
  if (rho.rows() == 0 || rho.rows() != rho.cols()) throw std::invalid_argument("DensityMatrix: must be square");
  if (!rho.allFinite()) throw std::invalid_argument("DensityMatrix: non-finite entry");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kTolerance)
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > kTolerance) throw std::invalid_argument("DensityMatrix: trace != 1");
  // rho + tol*I positive definite <=> smallest eigenvalue > -tol.
  CMatrix shifted = 0.5 * (rho + rho.adjoint());
  shifted.diagonal().array() += kTolerance;
  Eigen::LLT<CMatrix> llt(shifted);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("DensityMatrix: empty");
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(CMatrix::Identity(n, n) / static_cast<double>(dim));
}

LabeledBasis LabeledBasis::computational(MetricSpace space) {
  if (space.size() == 0) throw std::invalid_argument("LabeledBasis: empty metric space");
  LabeledBasis b;
  b.kind_ = Kind::Computational;
  b.state_dim_ = space.size();
  b.space_ = std::move(space);
  return b;
}

LabeledBasis LabeledBasis::from_unitary(CMatrix vectors, MetricSpace space) {
  if (vectors.rows() == 0 || vectors.rows() != vectors.cols())
    throw std::invalid_argument("LabeledBasis: basis matrix must be square");
  require_dim(static_cast<std::size_t>(vectors.cols()), space.size(), "LabeledBasis");
  const CMatrix gram = vectors.adjoint() * vectors;
  if ((gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("LabeledBasis: vectors are not orthonormal");
  LabeledBasis b;
  b.kind_ = Kind::Dense;
  b.state_dim_ = static_cast<std::size_t>(vectors.rows());
  b.space_ = std::move(space);
  b.vectors_ = std::make_shared<const CMatrix>(std::move(vectors));
  return b;
}

LabeledBasis LabeledBasis::from_analysis(Analysis analysis, std::size_t state_dim, MetricSpace space) {
  if (!analysis) throw std::invalid_argument("LabeledBasis: empty analysis map");
  if (state_dim == 0 || state_dim > space.size())
    throw std::invalid_argument("LabeledBasis: state dimension must be in [1, number of labels]");
  LabeledBasis b;
  b.kind_ = Kind::Analytic;
  b.state_dim_ = state_dim;
  b.space_ = std::move(space);
  b.analysis_ = std::move(analysis);
  return b;
}

CVector LabeledBasis::coefficients(const CVector& psi) const {
  require_dim(static_cast<std::size_t>(psi.size()), state_dim_, "LabeledBasis::coefficients");
  switch (kind_) {
    case Kind::Computational:
      return psi;
    case Kind::Dense:
      return vectors_->adjoint() * psi;
    case Kind::Analytic: {
      CVector c = analysis_(psi);
      require_dim(static_cast<std::size_t>(c.size()), size(), "LabeledBasis analysis map");
      return c;
    }
  }
  return {};
}

CMatrix LabeledBasis::coefficients(const CMatrix& columns) const {
  require_dim(static_cast<std::size_t>(columns.rows()), state_dim_, "LabeledBasis::coefficients");
  switch (kind_) {
    case Kind::Computational:
      return columns;
    case Kind::Dense:
      return vectors_->adjoint() * columns;
    case Kind::Analytic: {
      CMatrix out(static_cast<Eigen::Index>(size()), columns.cols());
      for (Eigen::Index j = 0; j < columns.cols(); ++j) out.col(j) = coefficients(CVector(columns.col(j)));
      return out;
    }
  }
  return {};
}

Distribution project_probabilities(const StateVector& psi, const LabeledBasis& basis) {
  const CVector c = basis.coefficients(psi.amplitudes());
  std::vector<double> p(static_cast<std::size_t>(c.size()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) total += p[i] = std::norm(c(i));
  if (std::abs(total - 1.0) > Distribution::kNormTolerance)
    throw std::invalid_argument("project_probabilities: basis is not complete for this state");
  return Distribution::normalized(std::move(p));
}

Distribution project_probabilities_mixed(const DensityMatrix& rho, const LabeledBasis& basis) {
  require_dim(rho.size(), basis.state_dim(), "project_probabilities_mixed");
  const auto n = static_cast<Eigen::Index>(basis.state_dim());
  // A is the analysis matrix, rows <xi_i|; p_i = (A rho A^dagger)_ii.
  const CMatrix a = basis.coefficients(CMatrix(CMatrix::Identity(n, n)));
  const CMatrix ar = a * rho.matrix();
  std::vector<double> p(basis.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double v = std::max(0.0, (ar.row(i) * a.row(i).adjoint())(0, 0).real());
    p[static_cast<std::size_t>(i)] = v;
    total += v;
  }
  if (std::abs(total - 1.0) > Distribution::kNormTolerance)
    throw std::invalid_argument("project_probabilities_mixed: basis is not complete for this state");
  return Distribution::normalized(std::move(p));
}

double physical_distance(const StateVector& a, const StateVector& b, const LabeledBasis& basis,
                         const DistanceConfig& cfg) {
  return wasserstein(project_probabilities(a, basis), project_probabilities(b, basis), basis.space(), cfg);
}

double fubini_study(const StateVector& a, const StateVector& b) {
  require_dim(a.size(), b.size(), "fubini_study");
  const double overlap = std::norm(a.amplitudes().dot(b.amplitudes()));
  return std::sqrt(std::max(0.0, 1.0 - overlap));
}

PositionGrid PositionGrid::periodic(std::size_t n, double period) {
  if (n < 2 || !(period > 0.0)) throw std::invalid_argument("PositionGrid: need n >= 2 and a positive period");
  PositionGrid g;
  g.period = period;
  g.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.points[i] = period * static_cast<double>(i) / static_cast<double>(n);
  return g;
}

PositionGrid PositionGrid::line(std::size_t n, double lo, double hi) {
  if (n < 2 || !(hi > lo)) throw std::invalid_argument("PositionGrid: need n >= 2 and hi > lo");
  PositionGrid g;
  g.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.points[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

double PositionGrid::spacing() const {
  if (points.size() < 2) throw std::invalid_argument("PositionGrid: fewer than two points");
  if (period) return *period / static_cast<double>(points.size());
  return (points.back() - points.front()) / static_cast<double>(points.size() - 1);
}

StateVector gaussian_packet_state(const GaussianPacket& packet, const PositionGrid& grid, double hbar) {
  if (!(packet.sigma > 0.0)) throw std::invalid_argument("gaussian_packet_state: sigma must be positive");
  if (!(hbar > 0.0)) throw std::invalid_argument("gaussian_packet_state: hbar must be positive");
  if (packet.sigma < grid.spacing()) throw std::invalid_argument("gaussian_packet_state: grid too coarse for sigma");
  CVector a(static_cast<Eigen::Index>(grid.points.size()));
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    double dx = grid.points[i] - packet.center_x;
    if (grid.period) dx = wrap_signed(dx, *grid.period);
    const double env = std::exp(-dx * dx / (4.0 * packet.sigma * packet.sigma));
    a(static_cast<Eigen::Index>(i)) = env * std::polar(1.0, packet.center_p * dx / hbar);
  }
  return StateVector::normalized(std::move(a));
}

}  // namespace qdist
