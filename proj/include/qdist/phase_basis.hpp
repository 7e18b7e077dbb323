#pragma once

// Phase-space cell bases built by grouped Fourier transforms over blocks of
// L consecutive number states.
//
// One degree of freedom: over the L^2 states |N>, N = 0..L^2-1,
//   |l, t> = L^{-1/2} sum_{k<L} exp(2 pi i k t / L) |k + l L>,
// column index l * L + t. Two degrees of freedom use the tensor product over
// |N1, N2> (state index N1 * L^2 + N2) with column index
// ((l1 * L + t1) * L + l2) * L + t2.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qdist/quantum.hpp"
#include "qdist/types.hpp"

namespace qdist {

struct PhaseCell {
  int ell = 0;
  int theta = 0;
};

/// Origin theta0 of the phase grid theta_M = theta0 + 2 pi M / L^2.
///
/// With `shifted` set the origin follows the cell,
///   theta0(t) = 2 pi t / L - pi (+ pi / L^2 for odd L),
/// so that theta_M - 2 pi t / L covers a window symmetric about 0 and the
/// phase-mean correction vanishes. Otherwise `fixed` is used for every cell.
struct PhaseWindow {
  bool shifted = true;
  double fixed = 0.0;

  double origin(int theta, int L) const;
};

class PhaseCellBasis {
 public:
  /// Basis the factor's rows refer to.
  enum class Representation { Number, Position };

  PhaseCellBasis() = default;
  PhaseCellBasis(int L, int dof, CMatrix factor, PhaseWindow window, Representation rep = Representation::Number);

  int resolution() const { return L_; }
  int dof() const { return dof_; }
  /// Number of cells, L^(2 dof); also the state dimension.
  std::size_t size() const;
  /// One-dof factor (L^2 x L^2, columns are cells).
  const CMatrix& factor() const { return factor_; }
  const PhaseWindow& window() const { return window_; }
  Representation representation() const { return rep_; }

  /// Full basis matrix (the Kronecker product for two degrees of freedom).
  CMatrix dense() const;
  /// <cell|psi> for every cell without forming the dense matrix.
  CVector analysis(const CVector& psi) const;

  /// Cell coordinates of column `index` for degree of freedom `which`.
  PhaseCell cell(std::size_t index, int which = 0) const;
  std::size_t index(const std::vector<PhaseCell>& cells) const;

 private:
  int L_ = 0;
  int dof_ = 0;
  CMatrix factor_;
  PhaseWindow window_;
  Representation rep_ = Representation::Number;
};

PhaseCellBasis build_phase_lattice_1d(int L, PhaseWindow window = {});
PhaseCellBasis build_phase_lattice_2d(int L, PhaseWindow window = {});

/// Planck-cell basis of the quantised torus with m^2 states, expressed in the
/// position representation x_n = 2 pi n / m^2. The lattice construction acts
/// on the momentum states p_k = 2 pi k / m^2; cell (l, t) is centred at
/// X = 2 pi t / m, P = 2 pi l / m + pi (m - 1) / m^2.
PhaseCellBasis rotor_wannier_basis(int m);

struct CellCenter {
  double x = 0.0;
  double p = 0.0;
};
CellCenter rotor_cell_center(int m, std::size_t index);

struct LocalizationRow {
  PhaseCell cell;
  double mean_n = 0.0;
  double delta_n = 0.0;  // sqrt(var N) / (L^2 - 1)
  double mean_theta = 0.0;
  double c_theta = 0.0;  // mean_theta - 2 pi t / L
  double delta_theta = 0.0;
};

struct LocalizationReport {
  int L = 0;
  /// One row per one-dof cell (the two-dof factors are identical).
  std::vector<LocalizationRow> rows;
  double max_delta_theta = 0.0;
  /// Fitted constant in delta_theta^2 ~ pi A / L.
  double fitted_a = 0.0;
};

/// Number and phase moments of every cell, computed from the basis vectors
/// and the phase states |theta_M> = L^{-1} sum_N exp(i N theta_M) |N>.
/// Requires a number-representation basis.
LocalizationReport localization_report(const PhaseCellBasis& basis);

/// Binary dump: "QDPB" magic, int32 L, int32 dof, int64 rows, int64 cols,
/// then rows*cols (re, im) doubles column-major; little-endian host order.
void export_basis_binary(const PhaseCellBasis& basis, const std::string& path);
/// Reads back the matrix written by export_basis_binary.
CMatrix import_basis_binary(const std::string& path, int* L = nullptr, int* dof = nullptr);

}  // namespace qdist
