#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "uwit/eigen.hpp"
#include "uwit/error.hpp"
#include "uwit/matrix.hpp"

namespace uwit {

inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPositivityTolerance = -1e-9;
inline constexpr double kNormTolerance = 1e-12;

/// Hermitian, unit-trace, positive semidefinite operator on a bipartite space.
/// Construction validates every invariant and throws InvalidStateError naming
/// the first one that fails.
class DensityMatrix {
 public:
  DensityMatrix(ComplexMatrix matrix, Dims dims) : matrix_(std::move(matrix)), dims_(dims) { validate(); }

  static DensityMatrix two_qubit(ComplexMatrix matrix) { return DensityMatrix(std::move(matrix), Dims{2, 2}); }

  static DensityMatrix maximally_mixed(Dims dims) {
    return DensityMatrix(ComplexMatrix::identity(dims.total()) * (1.0 / static_cast<double>(dims.total())), dims);
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  Dims dims() const { return dims_; }
  std::size_t dim() const { return matrix_.dim(); }
  bool is_two_qubit() const { return dims_ == Dims{2, 2}; }

 private:
  void validate() const {
    if (!matrix_.is_finite()) throw InvalidStateError("finite", "matrix contains NaN or Inf");
    if (dims_.alice == 0 || dims_.bob == 0 || dims_.total() != matrix_.dim()) {
      throw InvalidStateError("dimensions", std::to_string(dims_.alice) + "x" + std::to_string(dims_.bob) +
                                                " does not match matrix dimension " + std::to_string(matrix_.dim()));
    }
    const double defect = hermiticity_defect(matrix_);
    if (defect > kHermitianTolerance) {
      throw InvalidStateError("hermiticity", "||rho - rho^dagger|| = " + std::to_string(defect));
    }
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTolerance) throw InvalidStateError("trace", "Tr(rho) = " + std::to_string(tr));
    const double lowest = min_eigenvalue(matrix_);
    if (lowest < kPositivityTolerance) {
      throw InvalidStateError("positivity", "minimum eigenvalue " + std::to_string(lowest));
    }
  }

  ComplexMatrix matrix_;
  Dims dims_;
};

/// Normalized state vector on a bipartite space; amplitude index is
/// i * dims.bob + k for |i>_A |k>_B.
class PureState {
 public:
  PureState(std::vector<Complex> amplitudes, Dims dims) : amplitudes_(std::move(amplitudes)), dims_(dims) {
    if (dims_.total() != amplitudes_.size()) {
      throw Error(ErrorKind::DimensionMismatch, "pure state with " + std::to_string(amplitudes_.size()) +
                                                    " amplitudes cannot be split as " + std::to_string(dims_.alice) +
                                                    "x" + std::to_string(dims_.bob));
    }
    const double n = norm();
    if (std::abs(n - 1.0) > kNormTolerance) {
      throw Error(ErrorKind::InvalidParameter, "pure state norm " + std::to_string(n));
    }
  }

  /// Rescales to unit norm; throws for the zero vector.
  static PureState normalized(std::vector<Complex> amplitudes, Dims dims) {
    double sum = 0.0;
    for (const auto& a : amplitudes) sum += std::norm(a);
    if (sum == 0.0 || !std::isfinite(sum)) throw Error(ErrorKind::InvalidParameter, "cannot normalize zero vector");
    const double scale = 1.0 / std::sqrt(sum);
    for (auto& a : amplitudes) a *= scale;
    return PureState(std::move(amplitudes), dims);
  }

  static PureState product(std::span<const Complex> a, std::span<const Complex> b) {
    return normalized(kron(a, b), Dims{a.size(), b.size()});
  }

  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Dims dims() const { return dims_; }

  double norm() const {
    double sum = 0.0;
    for (const auto& a : amplitudes_) sum += std::norm(a);
    return std::sqrt(sum);
  }

  ComplexMatrix projector() const { return ComplexMatrix::outer(amplitudes_, amplitudes_); }
  DensityMatrix density() const { return DensityMatrix(projector(), dims_); }

 private:
  std::vector<Complex> amplitudes_;
  Dims dims_;
};

inline Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "inner product of unequal vectors");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// |BS_1> = (|00>+|11>)/sqrt2, |BS_2> = (|00>-|11>)/sqrt2,
/// |BS_3> = (|01>+|10>)/sqrt2, |BS_4> = (|01>-|10>)/sqrt2 (the singlet).
inline std::array<PureState, 4> bell_states() {
  const double h = std::numbers::sqrt2 / 2.0;
  const Dims qq{2, 2};
  return {PureState({h, 0.0, 0.0, h}, qq), PureState({h, 0.0, 0.0, -h}, qq), PureState({0.0, h, h, 0.0}, qq),
          PureState({0.0, h, -h, 0.0}, qq)};
}

inline PureState singlet_vector() { return bell_states()[3]; }
inline DensityMatrix singlet() { return singlet_vector().density(); }

/// Singular values of the dA x dB amplitude matrix, descending, min(dA, dB) of them.
inline std::vector<double> schmidt_coefficients(const PureState& psi) {
  const Dims d = psi.dims();
  const auto amp = psi.amplitudes();
  // Gram matrix on the smaller factor; its eigenvalues are the squared coefficients.
  const bool alice_smaller = d.alice <= d.bob;
  const std::size_t small = alice_smaller ? d.alice : d.bob;
  const std::size_t large = alice_smaller ? d.bob : d.alice;
  auto at = [&](std::size_t s, std::size_t l) {
    return alice_smaller ? amp[s * d.bob + l] : amp[l * d.bob + s];
  };
  ComplexMatrix gram(small);
  for (std::size_t i = 0; i < small; ++i)
    for (std::size_t j = 0; j < small; ++j) {
      Complex sum = 0.0;
      for (std::size_t l = 0; l < large; ++l) sum += at(i, l) * std::conj(at(j, l));
      gram(i, j) = sum;
    }
  auto values = hermitian_eigen(gram).values;
  std::vector<double> out(values.size());
  std::transform(values.rbegin(), values.rend(), out.begin(), [](double v) { return std::sqrt(std::max(v, 0.0)); });
  return out;
}

/// p |psi-><psi-| + (1 - p) sigma.
inline DensityMatrix noisy_singlet(double p, const DensityMatrix& sigma) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidWeight, "singlet weight " + std::to_string(p));
  if (!sigma.is_two_qubit()) throw Error(ErrorKind::DimensionMismatch, "noise must be a two-qubit state");
  ComplexMatrix m = singlet_vector().projector() * p + sigma.matrix() * (1.0 - p);
  return DensityMatrix::two_qubit(std::move(m));
}

inline DensityMatrix werner(double p) { return noisy_singlet(p, DensityMatrix::maximally_mixed(Dims{2, 2})); }

struct NptResult {
  bool npt = false;
  double min_eigenvalue = 0.0;
};

/// Negative partial transpose test; a state counts as NPT when the lowest
/// eigenvalue of its partial transpose is below -1e-9.
inline NptResult is_npt(const DensityMatrix& rho) {
  const double lowest = min_eigenvalue(partial_transpose(rho.matrix(), rho.dims()));
  return {lowest < kPositivityTolerance, lowest};
}

// ---------------------------------------------------------------------------
// Bell-diagonal geometry

/// (x, y, z) = (<sx sx>, <sy sy>, <sz sz>).
struct BellDiagonalCoords {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double radius_squared() const { return x * x + y * y + z * z; }
  friend bool operator==(const BellDiagonalCoords&, const BellDiagonalCoords&) = default;
};

/// Populations <BS_i|rho|BS_i> of a Bell-diagonal state in terms of its coordinates.
inline std::array<double, 4> bell_populations(const BellDiagonalCoords& c) {
  return {(1.0 + c.x - c.y + c.z) / 4.0, (1.0 - c.x + c.y + c.z) / 4.0, (1.0 + c.x + c.y - c.z) / 4.0,
          (1.0 - c.x - c.y - c.z) / 4.0};
}

inline std::array<double, 4> bell_populations(const DensityMatrix& rho) {
  if (!rho.is_two_qubit()) throw Error(ErrorKind::DimensionMismatch, "Bell populations need a two-qubit state");
  std::array<double, 4> out{};
  const auto bells = bell_states();
  for (std::size_t i = 0; i < 4; ++i) {
    const auto v = bells[i].amplitudes();
    out[i] = inner(v, rho.matrix() * v).real();
  }
  return out;
}

inline constexpr double kGeometryTolerance = 1e-12;

/// All four Bell populations nonnegative.
inline bool in_state_tetrahedron(const BellDiagonalCoords& c) {
  const auto p = bell_populations(c);
  return std::all_of(p.begin(), p.end(), [](double v) { return v >= -kGeometryTolerance; });
}

/// Inside the tetrahedron and Tr(rho W_i) = 1/2 - p_i >= 0 for every Bell witness W_i = 1/2 - |BS_i><BS_i|.
inline bool in_witness_octahedron(const BellDiagonalCoords& c) {
  if (!in_state_tetrahedron(c)) return false;
  const auto p = bell_populations(c);
  return std::all_of(p.begin(), p.end(), [](double v) { return 0.5 - v >= -kGeometryTolerance; });
}

/// (1 + x sx sx + y sy sy + z sz sz) / 4. Throws NotPositive outside the tetrahedron.
inline DensityMatrix bell_diagonal_state(const BellDiagonalCoords& c) {
  if (!in_state_tetrahedron(c)) {
    const auto p = bell_populations(c);
    throw Error(ErrorKind::NotPositive, "coordinates (" + std::to_string(c.x) + ", " + std::to_string(c.y) + ", " +
                                            std::to_string(c.z) + ") give Bell populations " + std::to_string(p[0]) +
                                            ", " + std::to_string(p[1]) + ", " + std::to_string(p[2]) + ", " +
                                            std::to_string(p[3]));
  }
  ComplexMatrix m = ComplexMatrix::identity(4);
  m += kron(pauli::x(), pauli::x()) * c.x;
  m += kron(pauli::y(), pauli::y()) * c.y;
  m += kron(pauli::z(), pauli::z()) * c.z;
  return DensityMatrix::two_qubit(m * 0.25);
}

inline BellDiagonalCoords coords_of(const DensityMatrix& rho) {
  if (!rho.is_two_qubit()) throw Error(ErrorKind::DimensionMismatch, "Bell-diagonal coordinates need a two-qubit state");
  const auto& m = rho.matrix();
  return {expectation(m, kron(pauli::x(), pauli::x())), expectation(m, kron(pauli::y(), pauli::y())),
          expectation(m, kron(pauli::z(), pauli::z()))};
}

}  // namespace uwit
