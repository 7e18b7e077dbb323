#pragma once

// Dense eigendecompositions and the infinite-time (diagonal-ensemble) average.

#include <cstddef>
#include <memory>
#include <vector>

#include "qdist/ot.hpp"
#include "qdist/quantum.hpp"
#include "qdist/types.hpp"

namespace qdist {

struct Eigensystem {
  enum class Kind { Hermitian, Unitary };

  Kind kind = Kind::Hermitian;
  /// Energies ascending, or eigenphases phi in [0, 2pi) ascending (u = e^{i phi}).
  Vector values;
  /// Orthonormal eigenvectors as columns, in the order of `values`.
  CMatrix vectors;
  /// Levels closer than degeneracy_tol * max(1, spectral radius) are treated
  /// as one degenerate block. Unitary spectra wrap around 2pi.
  double degeneracy_tol = 1e-10;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  /// Eigenvalue in complex form: E for Hermitian, e^{i phi} for unitary.
  Complex eigenvalue(std::size_t i) const;
  /// Groups of level indices sharing an eigenvalue, in ascending order.
  std::vector<std::vector<Eigen::Index>> clusters() const;
  /// max_a ||A v_a - x_a v_a|| for the operator that was diagonalised.
  template <class M>
  double residual(const M& op) const {
    double r = 0.0;
    for (Eigen::Index a = 0; a < vectors.cols(); ++a) {
      const CVector v = vectors.col(a);
      r = std::max(r, (op * v - eigenvalue(static_cast<std::size_t>(a)) * v).norm());
    }
    return r;
  }
};

/// Real symmetric input (LAPACK dsyevd). Symmetry checked to 1e-8 relative.
Eigensystem diagonalize(const Matrix& h);
/// Complex Hermitian input (LAPACK zheevd).
Eigensystem diagonalize(const CMatrix& h);
/// Unitary input via complex Schur form (LAPACK zgees); for a normal matrix
/// the Schur vectors are orthonormal eigenvectors. Unitarity checked to 1e-8.
Eigensystem diagonalize_unitary(const CMatrix& u);

/// lim (1/T) sum_t rho(t): sum over degenerate blocks c of P_c |psi0><psi0| P_c.
DensityMatrix diagonal_ensemble(const StateVector& psi0, const Eigensystem& eig);
/// Mixed-state form: sum_c P_c rho P_c.
DensityMatrix diagonal_ensemble(const DensityMatrix& rho, const Eigensystem& eig);

/// Diagonal-ensemble distribution over a labeled basis without forming the
/// density matrix. The overlaps W_ia = <xi_i|E_a> are computed once; each
/// initial state then costs O(labels * levels).
class DiagonalEnsembleProjector {
 public:
  DiagonalEnsembleProjector(std::shared_ptr<const Eigensystem> eig, const LabeledBasis& basis);

  /// p_i = sum_c |sum_{a in c} W_ia <E_a|psi0>|^2.
  Distribution distribution(const StateVector& psi0) const;
  /// Same from precomputed eigenbasis coefficients c_a = <E_a|psi0>.
  Distribution distribution_from_coefficients(const CVector& c) const;

  const Eigensystem& eigensystem() const { return *eig_; }
  std::size_t labels() const { return labels_; }
  /// W_ia = <xi_i|E_a>.
  const CMatrix& overlaps() const { return overlaps_ ? *overlaps_ : eig_->vectors; }

 private:
  std::shared_ptr<const Eigensystem> eig_;
  std::shared_ptr<const CMatrix> overlaps_;  // null for the computational basis
  std::vector<std::vector<Eigen::Index>> clusters_;
  std::size_t labels_ = 0;
};

}  // namespace qdist
