#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "uwit/error.hpp"
#include "uwit/matrix.hpp"

namespace uwit {

/// Eigen-decomposition h = V diag(values) V^dagger. Values ascend; column i of
/// `vectors` belongs to values[i].
struct Spectrum {
  std::vector<double> values;
  ComplexMatrix vectors;

  std::vector<Complex> vector(std::size_t i) const {
    std::vector<Complex> v(vectors.dim());
    for (std::size_t r = 0; r < v.size(); ++r) v[r] = vectors(r, i);
    return v;
  }

  ComplexMatrix reconstruct() const {
    const std::size_t n = vectors.dim();
    ComplexMatrix out(n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        const Complex vik = vectors(i, k) * values[k];
        for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(vectors(j, k));
      }
    return out;
  }
};

struct JacobiOptions {
  double off_diagonal_tolerance = 1e-12;
  int max_sweeps = 100;
};

namespace detail {

inline double off_diagonal_mass(const ComplexMatrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

// Zeroes a(p,q) with the unitary U = diag(1, e^{-i phi}) * R(c, s), where phi
// is the phase of a(p,q) and R is the real Jacobi rotation of the resulting
// real symmetric 2x2 block. Updates a <- U^dagger a U and v <- v U.
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const Complex b = a(p, q);
  const double mag = std::abs(b);
  if (mag == 0.0) return;
  const Complex phase_conj = std::conj(b / mag);
  const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    if (theta < 0.0) t = -t;
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Complex upp = c, upq = s, uqp = -s * phase_conj, uqq = c * phase_conj;
  const std::size_t n = a.dim();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p), akq = a(k, q);
    a(k, p) = akp * upp + akq * uqp;
    a(k, q) = akp * upq + akq * uqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k), aqk = a(q, k);
    a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
    a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p), vkq = v(k, q);
    v(k, p) = vkp * upp + vkq * uqp;
    v(k, q) = vkp * upq + vkq * uqq;
  }
}

}  // namespace detail

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Sweeps over all (p, q) pairs in row order until the off-diagonal
/// Hilbert-Schmidt mass drops below `off_diagonal_tolerance` scaled by
/// max(1, ||h||). Eigenvalues come back ascending; ties keep the order in
/// which the rotations left them on the diagonal.
inline Spectrum hermitian_eigen(const ComplexMatrix& h, JacobiOptions options = {}) {
  if (!h.is_finite()) throw Error(ErrorKind::InvalidParameter, "eigendecomposition of a non-finite matrix");
  const double defect = hermiticity_defect(h);
  if (defect > kHermitianTolerance) {
    throw Error(ErrorKind::NotHermitian, "||h - h^dagger|| = " + std::to_string(defect));
  }
  const std::size_t n = h.dim();
  ComplexMatrix a = (h + h.adjoint()) * 0.5;
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double tol = options.off_diagonal_tolerance * std::max(1.0, hs_norm(h));

  bool converged = false;
  for (int sweep = 0; sweep <= options.max_sweeps; ++sweep) {
    if (detail::off_diagonal_mass(a) < tol) {
      converged = true;
      break;
    }
    if (sweep == options.max_sweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
  }
  if (!converged) {
    throw Error(ErrorKind::NoConvergence,
                "Jacobi iteration did not converge in " + std::to_string(options.max_sweeps) + " sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  Spectrum out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

inline double min_eigenvalue(const ComplexMatrix& h) { return hermitian_eigen(h).values.front(); }

}  // namespace uwit
