#include "qdist/eigensystem.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace qdist {
namespace {

void check_square(Eigen::Index rows, Eigen::Index cols, const char* where) {
  if (rows == 0 || rows != cols) throw std::invalid_argument(std::string(where) + ": matrix must be square");
}

template <class M>
void check_hermitian(const M& h, const char* where) {
  check_square(h.rows(), h.cols(), where);
  if (!h.allFinite()) throw std::invalid_argument(std::string(where) + ": non-finite entry");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument(std::string(where) + ": matrix is not Hermitian");
}

}  // namespace

Complex Eigensystem::eigenvalue(std::size_t i) const {
  const double v = values(static_cast<Eigen::Index>(i));
  return kind == Kind::Unitary ? std::polar(1.0, v) : Complex(v, 0.0);
}

std::vector<std::vector<Eigen::Index>> Eigensystem::clusters() const {
  std::vector<std::vector<Eigen::Index>> out;
  const Eigen::Index n = values.size();
  if (n == 0) return out;
  const double scale = kind == Kind::Unitary ? 1.0 : std::max(1.0, values.cwiseAbs().maxCoeff());
  const double tol = degeneracy_tol * scale;
  out.push_back({0});
  for (Eigen::Index a = 1; a < n; ++a) {
    if (values(a) - values(a - 1) <= tol)
      out.back().push_back(a);
    else
      out.push_back({a});
  }
  if (kind == Kind::Unitary && out.size() > 1 && values(0) + kTwoPi - values(n - 1) <= tol) {
    out.front().insert(out.front().end(), out.back().begin(), out.back().end());
    out.pop_back();
  }
  return out;
}

Eigensystem diagonalize(const Matrix& h) {
  check_hermitian(h, "diagonalize");
  const auto n = static_cast<lapack_int>(h.rows());
  Matrix a = 0.5 * (h + h.transpose());
  Vector w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info < 0) throw std::invalid_argument("diagonalize: invalid LAPACK argument");
  if (info > 0) throw ConvergenceError("diagonalize: dsyevd failed to converge");
  Eigensystem e;
  e.kind = Eigensystem::Kind::Hermitian;
  e.values = std::move(w);
  e.vectors = a.cast<Complex>();
  return e;
}

Eigensystem diagonalize(const CMatrix& h) {
  check_hermitian(h, "diagonalize");
  const auto n = static_cast<lapack_int>(h.rows());
  CMatrix a = 0.5 * (h + h.adjoint());
  Vector w(n);
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info < 0) throw std::invalid_argument("diagonalize: invalid LAPACK argument");
  if (info > 0) throw ConvergenceError("diagonalize: zheevd failed to converge");
  Eigensystem e;
  e.kind = Eigensystem::Kind::Hermitian;
  e.values = std::move(w);
  e.vectors = std::move(a);
  return e;
}

Eigensystem diagonalize_unitary(const CMatrix& u) {
  check_square(u.rows(), u.cols(), "diagonalize_unitary");
  if (!u.allFinite()) throw std::invalid_argument("diagonalize_unitary: non-finite entry");
  const Eigen::Index n = u.rows();
  if ((u.adjoint() * u - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("diagonalize_unitary: matrix is not unitary");

  CMatrix t = u;
  CMatrix z(n, n);
  CVector w(n);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, static_cast<lapack_int>(n), t.data(),
                                        static_cast<lapack_int>(n), &sdim, w.data(), z.data(),
                                        static_cast<lapack_int>(n));
  if (info < 0) throw std::invalid_argument("diagonalize_unitary: invalid LAPACK argument");
  if (info > 0) throw ConvergenceError("diagonalize_unitary: zgees failed to converge");

  Vector phase(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    double p = std::arg(w(a));
    if (p < 0.0) p += kTwoPi;
    if (p >= kTwoPi) p -= kTwoPi;
    phase(a) = p;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return phase(x) < phase(y); });

  Eigensystem e;
  e.kind = Eigensystem::Kind::Unitary;
  e.values.resize(n);
  e.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    e.values(k) = phase(order[static_cast<std::size_t>(k)]);
    e.vectors.col(k) = z.col(order[static_cast<std::size_t>(k)]);
  }
  return e;
}

DensityMatrix diagonal_ensemble(const StateVector& psi0, const Eigensystem& eig) {
  if (psi0.size() != static_cast<std::size_t>(eig.vectors.rows()))
    throw std::invalid_argument("diagonal_ensemble: dimension mismatch");
  const CVector c = eig.vectors.adjoint() * psi0.amplitudes();
  const Eigen::Index n = eig.vectors.rows();
  CMatrix rho = CMatrix::Zero(n, n);
  for (const auto& cluster : eig.clusters()) {
    CVector v = CVector::Zero(n);
    for (Eigen::Index a : cluster) v += c(a) * eig.vectors.col(a);
    rho.noalias() += v * v.adjoint();
  }
  return DensityMatrix::from_matrix(std::move(rho));
}

DensityMatrix diagonal_ensemble(const DensityMatrix& rho, const Eigensystem& eig) {
  if (rho.size() != static_cast<std::size_t>(eig.vectors.rows()))
    throw std::invalid_argument("diagonal_ensemble: dimension mismatch");
  // Block-diagonal part of rho in the eigenbasis, rotated back.
  const CMatrix r = eig.vectors.adjoint() * rho.matrix() * eig.vectors;
  CMatrix blocks = CMatrix::Zero(r.rows(), r.cols());
  for (const auto& cluster : eig.clusters())
    for (Eigen::Index a : cluster)
      for (Eigen::Index b : cluster) blocks(a, b) = r(a, b);
  CMatrix out = eig.vectors * blocks * eig.vectors.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix::from_matrix(std::move(out));
}

DiagonalEnsembleProjector::DiagonalEnsembleProjector(std::shared_ptr<const Eigensystem> eig,
                                                     const LabeledBasis& basis)
    : eig_(std::move(eig)) {
  if (!eig_) throw std::invalid_argument("DiagonalEnsembleProjector: null eigensystem");
  if (static_cast<std::size_t>(eig_->vectors.rows()) != basis.state_dim())
    throw std::invalid_argument("DiagonalEnsembleProjector: dimension mismatch");
  labels_ = basis.size();
  if (!basis.is_computational()) overlaps_ = std::make_shared<const CMatrix>(basis.coefficients(eig_->vectors));
  clusters_ = eig_->clusters();
}

Distribution DiagonalEnsembleProjector::distribution(const StateVector& psi0) const {
  if (psi0.size() != static_cast<std::size_t>(eig_->vectors.rows()))
    throw std::invalid_argument("DiagonalEnsembleProjector: dimension mismatch");
  return distribution_from_coefficients(eig_->vectors.adjoint() * psi0.amplitudes());
}

Distribution DiagonalEnsembleProjector::distribution_from_coefficients(const CVector& c) const {
  if (c.size() != eig_->vectors.cols()) throw std::invalid_argument("DiagonalEnsembleProjector: dimension mismatch");
  const CMatrix& w = overlaps_ ? *overlaps_ : eig_->vectors;
  Vector p = Vector::Zero(static_cast<Eigen::Index>(labels_));
  CVector acc(p.size());
  for (const auto& cluster : clusters_) {
    if (cluster.size() == 1) {
      const double weight = std::norm(c(cluster[0]));
      if (weight > 0.0) p.noalias() += weight * w.col(cluster[0]).cwiseAbs2();
      continue;
    }
    acc.setZero();
    for (Eigen::Index a : cluster) acc.noalias() += c(a) * w.col(a);
    p.noalias() += acc.cwiseAbs2();
  }
  if (std::abs(p.sum() - 1.0) > Distribution::kNormTolerance)
    throw std::invalid_argument("DiagonalEnsembleProjector: state is not normalised or basis is incomplete");
  return Distribution::normalized(std::vector<double>(p.data(), p.data() + p.size()));
}

}  // namespace qdist
