#include "qdist/phase_basis.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qdist {
namespace {

constexpr char kMagic[4] = {'Q', 'D', 'P', 'B'};

void check_resolution(int L) {
  if (L < 2) throw std::invalid_argument("phase lattice: L must be >= 2");
  if (L > 64) throw ResourceError("phase lattice: L too large for dense construction");
}

CMatrix lattice_factor(int L) {
  const int n = L * L;
  CMatrix f = CMatrix::Zero(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(L));
  for (int l = 0; l < L; ++l)
    for (int t = 0; t < L; ++t)
      for (int k = 0; k < L; ++k) f(k + l * L, l * L + t) = norm * std::polar(1.0, kTwoPi * k * t / L);
  return f;
}

}  // namespace

double PhaseWindow::origin(int theta, int L) const {
  if (!shifted) return fixed;
  double o = kTwoPi * theta / L - kPi;
  if (L % 2 == 1) o += kPi / (static_cast<double>(L) * L);
  return o;
}

PhaseCellBasis::PhaseCellBasis(int L, int dof, CMatrix factor, PhaseWindow window, Representation rep)
    : L_(L), dof_(dof), factor_(std::move(factor)), window_(window), rep_(rep) {
  if (dof != 1 && dof != 2) throw std::invalid_argument("PhaseCellBasis: dof must be 1 or 2");
  if (factor_.rows() != L * L || factor_.cols() != L * L)
    throw std::invalid_argument("PhaseCellBasis: factor must be L^2 x L^2");
}

std::size_t PhaseCellBasis::size() const {
  const auto n = static_cast<std::size_t>(L_) * static_cast<std::size_t>(L_);
  return dof_ == 1 ? n : n * n;
}

CMatrix PhaseCellBasis::dense() const {
  if (dof_ == 1) return factor_;
  const Eigen::Index n = factor_.rows();
  CMatrix out(n * n, n * n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out.block(a * n, b * n, n, n) = factor_(a, b) * factor_;
  return out;
}

CVector PhaseCellBasis::analysis(const CVector& psi) const {
  if (static_cast<std::size_t>(psi.size()) != size()) throw std::invalid_argument("PhaseCellBasis: dimension mismatch");
  if (dof_ == 1) return factor_.adjoint() * psi;
  // psi(N1 * n + N2) viewed column-major as Psi(N2, N1); result R(c2, c1).
  const Eigen::Index n = factor_.rows();
  const Eigen::Map<const CMatrix> grid(psi.data(), n, n);
  const CMatrix r = factor_.adjoint() * grid * factor_.conjugate();
  return Eigen::Map<const CVector>(r.data(), n * n);
}

PhaseCell PhaseCellBasis::cell(std::size_t index, int which) const {
  if (index >= size() || which < 0 || which >= dof_) throw std::invalid_argument("PhaseCellBasis::cell: out of range");
  const auto n = static_cast<std::size_t>(L_) * static_cast<std::size_t>(L_);
  const std::size_t local = dof_ == 1 ? index : (which == 0 ? index / n : index % n);
  return {static_cast<int>(local / static_cast<std::size_t>(L_)), static_cast<int>(local % static_cast<std::size_t>(L_))};
}

std::size_t PhaseCellBasis::index(const std::vector<PhaseCell>& cells) const {
  if (static_cast<int>(cells.size()) != dof_) throw std::invalid_argument("PhaseCellBasis::index: wrong number of cells");
  std::size_t idx = 0;
  for (const auto& c : cells) {
    if (c.ell < 0 || c.ell >= L_ || c.theta < 0 || c.theta >= L_)
      throw std::invalid_argument("PhaseCellBasis::index: coordinate out of range");
    idx = idx * static_cast<std::size_t>(L_) * static_cast<std::size_t>(L_) + static_cast<std::size_t>(c.ell * L_ + c.theta);
  }
  return idx;
}

PhaseCellBasis build_phase_lattice_1d(int L, PhaseWindow window) {
  check_resolution(L);
  return PhaseCellBasis(L, 1, lattice_factor(L), window);
}

PhaseCellBasis build_phase_lattice_2d(int L, PhaseWindow window) {
  check_resolution(L);
  return PhaseCellBasis(L, 2, lattice_factor(L), window);
}

PhaseCellBasis rotor_wannier_basis(int m) {
  check_resolution(m);
  const int dim = m * m;
  // Lattice over momentum states; column t' = -t mod m puts the position
  // peak at X = 2 pi t / m.
  const CMatrix lattice = lattice_factor(m);
  CMatrix momentum(dim, dim);
  for (int l = 0; l < m; ++l)
    for (int t = 0; t < m; ++t) momentum.col(l * m + t) = lattice.col(l * m + (m - t) % m);
  CMatrix to_position(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int n = 0; n < dim; ++n)
    for (int k = 0; k < dim; ++k)
      to_position(n, k) = norm * std::polar(1.0, kTwoPi * static_cast<double>((static_cast<long>(k) * n) % dim) / dim);
  return PhaseCellBasis(m, 1, to_position * momentum, PhaseWindow{}, PhaseCellBasis::Representation::Position);
}

CellCenter rotor_cell_center(int m, std::size_t index) {
  if (m < 2 || index >= static_cast<std::size_t>(m) * static_cast<std::size_t>(m))
    throw std::invalid_argument("rotor_cell_center: out of range");
  const int l = static_cast<int>(index / static_cast<std::size_t>(m));
  const int t = static_cast<int>(index % static_cast<std::size_t>(m));
  return {kTwoPi * t / m, kTwoPi * l / m + kPi * (m - 1) / (static_cast<double>(m) * m)};
}

LocalizationReport localization_report(const PhaseCellBasis& basis) {
  if (basis.representation() != PhaseCellBasis::Representation::Number)
    throw std::invalid_argument("localization_report: basis must be in the number representation");
  const int L = basis.resolution();
  const int dim = L * L;
  const double n_max = dim - 1.0;
  const CMatrix& f = basis.factor();

  LocalizationReport rep;
  rep.L = L;
  double sum_var_theta = 0.0;
  for (int col = 0; col < dim; ++col) {
    const PhaseCell c{col / L, col % L};
    LocalizationRow row;
    row.cell = c;
    double m1 = 0.0, m2 = 0.0;
    for (int n = 0; n < dim; ++n) {
      const double w = std::norm(f(n, col));
      m1 += w * n;
      m2 += w * n * static_cast<double>(n);
    }
    row.mean_n = m1;
    row.delta_n = std::sqrt(std::max(0.0, m2 - m1 * m1)) / n_max;

    const double theta0 = basis.window().origin(c.theta, L);
    double t1 = 0.0, t2 = 0.0;
    for (int mm = 0; mm < dim; ++mm) {
      const double theta_m = theta0 + kTwoPi * mm / dim;
      Complex overlap = 0.0;  // <theta_M|cell>
      for (int n = 0; n < dim; ++n) overlap += std::polar(1.0, -n * theta_m) * f(n, col);
      const double w = std::norm(overlap) / dim;
      t1 += w * theta_m;
      t2 += w * theta_m * theta_m;
    }
    row.mean_theta = t1;
    row.c_theta = t1 - kTwoPi * c.theta / L;
    row.delta_theta = std::sqrt(std::max(0.0, t2 - t1 * t1));
    rep.max_delta_theta = std::max(rep.max_delta_theta, row.delta_theta);
    sum_var_theta += row.delta_theta * row.delta_theta;
    rep.rows.push_back(row);
  }
  rep.fitted_a = L * (sum_var_theta / dim) / kPi;
  return rep;
}

void export_basis_binary(const PhaseCellBasis& basis, const std::string& path) {
  const CMatrix m = basis.dense();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_basis_binary: cannot open " + path);
  const std::int32_t L = basis.resolution(), dof = basis.dof();
  const std::int64_t rows = m.rows(), cols = m.cols();
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&L), sizeof L);
  out.write(reinterpret_cast<const char*>(&dof), sizeof dof);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(Complex) * m.size()));
  if (!out) throw std::runtime_error("export_basis_binary: write failed");
}

CMatrix import_basis_binary(const std::string& path, int* L, int* dof) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("import_basis_binary: cannot open " + path);
  char magic[4];
  std::int32_t l = 0, d = 0;
  std::int64_t rows = 0, cols = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&l), sizeof l);
  in.read(reinterpret_cast<char*>(&d), sizeof d);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || std::memcmp(magic, kMagic, 4) != 0 || rows <= 0 || cols <= 0)
    throw std::invalid_argument("import_basis_binary: bad header");
  CMatrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(Complex) * m.size()));
  if (!in) throw std::invalid_argument("import_basis_binary: truncated data");
  if (L) *L = l;
  if (dof) *dof = d;
  return m;
}

}  // namespace qdist
