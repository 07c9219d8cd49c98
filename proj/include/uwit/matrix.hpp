#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uwit/error.hpp"

namespace uwit {

using Complex = std::complex<double>;

/// Absolute Hilbert-Schmidt tolerance used for every Hermiticity check.
inline constexpr double kHermitianTolerance = 1e-10;

/// Bipartite split of a Hilbert space, dim = alice * bob.
struct Dims {
  std::size_t alice = 0;
  std::size_t bob = 0;

  std::size_t total() const { return alice * bob; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Dense square complex matrix stored row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

  ComplexMatrix(std::size_t dim, std::vector<Complex> entries) : dim_(dim), data_(std::move(entries)) {
    if (data_.size() != dim_ * dim_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "expected " + std::to_string(dim_ * dim_) + " entries, got " + std::to_string(data_.size()));
    }
  }

  /// Row-wise literal, e.g. {{0, 1}, {1, 0}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) : dim_(rows.size()) {
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
      if (row.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "matrix literal is not square");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  /// |v><w|
  static ComplexMatrix outer(std::span<const Complex> v, std::span<const Complex> w) {
    if (v.size() != w.size()) throw Error(ErrorKind::DimensionMismatch, "outer product of unequal vectors");
    ComplexMatrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * std::conj(w[j]);
    return m;
  }

  std::size_t dim() const { return dim_; }
  std::span<const Complex> entries() const { return data_; }
  std::span<Complex> entries() { return data_; }

  Complex& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const { return data_[row * dim_ + col]; }

  bool is_finite() const {
    for (const auto& z : data_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }

  ComplexMatrix& operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    a.require_same_dim(b);
    const std::size_t n = a.dim_;
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex{}) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend std::vector<Complex> operator*(const ComplexMatrix& a, std::span<const Complex> v) {
    if (v.size() != a.dim_) throw Error(ErrorKind::DimensionMismatch, "matrix-vector size mismatch");
    std::vector<Complex> out(a.dim_);
    for (std::size_t i = 0; i < a.dim_; ++i)
      for (std::size_t j = 0; j < a.dim_; ++j) out[i] += a(i, j) * v[j];
    return out;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

  void require_same_dim(const ComplexMatrix& o) const {
    if (o.dim_ != dim_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "dimension " + std::to_string(dim_) + " vs " + std::to_string(o.dim_));
    }
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

/// Kronecker product: entry (i*db + k, j*db + l) = a(i,j) * b(k,l).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t da = a.dim(), db = b.dim();
  ComplexMatrix out(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) {
      const Complex aij = a(i, j);
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) out(i * db + k, j * db + l) = aij * b(k, l);
    }
  return out;
}

inline std::vector<Complex> kron(std::span<const Complex> a, std::span<const Complex> b) {
  std::vector<Complex> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(x * y);
  return out;
}

/// Transposes the second tensor factor: ((i,k),(j,l)) -> ((i,l),(j,k)).
inline ComplexMatrix partial_transpose(const ComplexMatrix& m, Dims dims) {
  if (dims.total() != m.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "partial transpose: " + std::to_string(dims.alice) + "x" +
                                                  std::to_string(dims.bob) + " does not match dimension " +
                                                  std::to_string(m.dim()));
  }
  const std::size_t db = dims.bob;
  ComplexMatrix out(m.dim());
  for (std::size_t i = 0; i < dims.alice; ++i)
    for (std::size_t j = 0; j < dims.alice; ++j)
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) out(i * db + l, j * db + k) = m(i * db + k, j * db + l);
  return out;
}

/// Hilbert-Schmidt (Frobenius) norm sqrt(Tr(A A^dagger)).
inline double hs_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (const auto& z : a.entries()) sum += std::norm(z);
  return std::sqrt(sum);
}

inline double hermiticity_defect(const ComplexMatrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) sum += std::norm(a(i, j) - std::conj(a(j, i)));
  return std::sqrt(sum);
}

inline bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTolerance) {
  return hermiticity_defect(a) <= tol;
}

/// Tr(A B) without forming the product.
inline Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  a.require_same_dim(b);
  Complex t = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t k = 0; k < a.dim(); ++k) t += a(i, k) * b(k, i);
  return t;
}

/// <M>_rho = Re Tr(rho M). The imaginary part must vanish for Hermitian inputs.
inline double expectation(const ComplexMatrix& rho, const ComplexMatrix& m) {
  if (rho.dim() != m.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "expectation: state dimension " + std::to_string(rho.dim()) +
                                                  " vs observable dimension " + std::to_string(m.dim()));
  }
  if (!is_hermitian(rho) || !is_hermitian(m)) throw Error(ErrorKind::NotHermitian, "expectation of non-Hermitian operands");
  const Complex t = trace_of_product(rho, m);
  if (std::abs(t.imag()) > 1e-10) {
    throw Error(ErrorKind::NotHermitian, "Tr(rho M) has imaginary part " + std::to_string(t.imag()));
  }
  return t.real();
}

namespace pauli {

inline ComplexMatrix identity() { return ComplexMatrix::identity(2); }
inline ComplexMatrix x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix y() { return {{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}}; }
inline ComplexMatrix z() { return {{1.0, 0.0}, {0.0, -1.0}}; }

/// sigma_x, sigma_y, sigma_z in that order.
inline std::vector<ComplexMatrix> all() { return {x(), y(), z()}; }

}  // namespace pauli

}  // namespace uwit
