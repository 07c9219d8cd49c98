#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "uwit/error.hpp"
#include "uwit/matrix.hpp"
#include "uwit/states.hpp"

namespace uwit {

using RandomStream = std::mt19937_64;

/// Independent stream for (seed, stream index). Parallel workers derive their
/// generators here so results never depend on how work is scheduled.
inline RandomStream make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return RandomStream(seq);
}

/// Haar-random unit vector in C^dim.
inline std::vector<Complex> random_unit_vector(std::size_t dim, RandomStream& rng) {
  std::normal_distribution<double> gauss;
  std::vector<Complex> v(dim);
  double sum = 0.0;
  do {
    sum = 0.0;
    for (auto& a : v) {
      a = Complex(gauss(rng), gauss(rng));
      sum += std::norm(a);
    }
  } while (sum == 0.0);
  const double scale = 1.0 / std::sqrt(sum);
  for (auto& a : v) a *= scale;
  return v;
}

inline PureState random_pure_state(Dims dims, RandomStream& rng) {
  return PureState::normalized(random_unit_vector(dims.total(), rng), dims);
}

inline PureState random_product_state(Dims dims, RandomStream& rng) {
  const auto a = random_unit_vector(dims.alice, rng);
  const auto b = random_unit_vector(dims.bob, rng);
  return PureState::product(a, b);
}

/// GUE-distributed Hermitian matrix (isotropic under the Hilbert-Schmidt inner product).
inline ComplexMatrix random_hermitian(std::size_t dim, RandomStream& rng) {
  std::normal_distribution<double> gauss;
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m(i, i) = gauss(rng);
    for (std::size_t j = i + 1; j < dim; ++j) {
      const Complex z(gauss(rng) * std::numbers::sqrt2 / 2.0, gauss(rng) * std::numbers::sqrt2 / 2.0);
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return m;
}

/// Hilbert-Schmidt-measure random mixed state: G G^dagger / Tr, with G Ginibre.
inline DensityMatrix random_density_matrix(Dims dims, RandomStream& rng) {
  std::normal_distribution<double> gauss;
  const std::size_t n = dims.total();
  ComplexMatrix g(n);
  for (auto& z : g.entries()) z = Complex(gauss(rng), gauss(rng));
  ComplexMatrix m = g * g.adjoint();
  m = (m + m.adjoint()) * 0.5;
  m *= 1.0 / m.trace().real();
  return DensityMatrix(std::move(m), dims);
}

/// Convex mixture of `components` random product states with flat (Dirichlet(1)) weights.
inline DensityMatrix random_separable(std::size_t components, Dims dims, RandomStream& rng) {
  if (components == 0) throw Error(ErrorKind::InvalidParameter, "separable mixture needs at least one component");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> weights(components);
  double total = 0.0;
  for (auto& w : weights) total += (w = expo(rng));
  ComplexMatrix m(dims.total());
  for (std::size_t k = 0; k < components; ++k) m += random_product_state(dims, rng).projector() * (weights[k] / total);
  m = (m + m.adjoint()) * 0.5;
  return DensityMatrix(std::move(m), dims);
}

inline constexpr std::size_t kMaxRejections = 1'000'000;

/// Uniform draw from the Hilbert-Schmidt ball ||sigma - 1/4|| <= d of
/// two-qubit states: a Gaussian traceless Hermitian direction scaled to
/// radius d * u^(1/15), redrawn until positive semidefinite.
inline DensityMatrix sample_noise_ball(double d, RandomStream& rng, std::size_t max_rejections = kMaxRejections) {
  if (!(d >= 0.0) || !std::isfinite(d)) throw Error(ErrorKind::InvalidParameter, "ball radius " + std::to_string(d));
  const ComplexMatrix centre = ComplexMatrix::identity(4) * 0.25;
  if (d == 0.0) return DensityMatrix::two_qubit(centre);

  constexpr double kRealDimension = 15.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t attempt = 0; attempt < max_rejections; ++attempt) {
    ComplexMatrix g = random_hermitian(4, rng);
    const Complex shift = g.trace() * 0.25;
    for (std::size_t i = 0; i < 4; ++i) g(i, i) -= shift;
    const double len = hs_norm(g);
    if (len == 0.0) continue;
    const double r = d * std::pow(unit(rng), 1.0 / kRealDimension);
    ComplexMatrix sigma = centre + g * (r / len);
    if (min_eigenvalue(sigma) >= kPositivityTolerance) return DensityMatrix::two_qubit(std::move(sigma));
  }
  throw Error(ErrorKind::RejectionOverflow,
              std::to_string(max_rejections) + " consecutive non-positive draws at d = " + std::to_string(d));
}

}  // namespace uwit
