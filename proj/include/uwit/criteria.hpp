#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "uwit/eigen.hpp"
#include "uwit/error.hpp"
#include "uwit/matrix.hpp"
#include "uwit/states.hpp"

namespace uwit {

/// Eigenvalues closer than this are treated as one degenerate outcome.
inline constexpr double kDegeneracyTolerance = 1e-8;

/// Hermitian observable together with its spectral decomposition
/// M = sum_i mu_i X_i over distinct eigenvalues mu_i (ascending) and
/// eigenprojectors X_i.
class Observable {
 public:
  struct Eigenspace {
    double value = 0.0;
    ComplexMatrix projector;
    std::vector<std::vector<Complex>> basis;

    std::size_t rank() const { return basis.size(); }
  };

  explicit Observable(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    const Spectrum spectrum = hermitian_eigen(matrix_);
    double previous = 0.0;
    for (std::size_t k = 0; k < spectrum.values.size(); ++k) {
      const double mu = spectrum.values[k];
      if (spaces_.empty() || mu - previous > kDegeneracyTolerance) {
        spaces_.push_back(Eigenspace{mu, ComplexMatrix(matrix_.dim()), {}});
      }
      previous = mu;
      auto v = spectrum.vector(k);
      spaces_.back().projector += ComplexMatrix::outer(v, v);
      spaces_.back().basis.push_back(std::move(v));
    }
    // Report each merged eigenvalue as the mean of its members.
    std::size_t k = 0;
    for (auto& space : spaces_) {
      double sum = 0.0;
      for (std::size_t j = 0; j < space.rank(); ++j) sum += spectrum.values[k + j];
      space.value = sum / static_cast<double>(space.rank());
      k += space.rank();
    }
    square_ = matrix_ * matrix_;
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  const ComplexMatrix& square() const { return square_; }
  std::span<const Eigenspace> eigenspaces() const { return spaces_; }
  std::size_t dim() const { return matrix_.dim(); }

  bool is_nondegenerate() const {
    return std::all_of(spaces_.begin(), spaces_.end(), [](const Eigenspace& s) { return s.rank() == 1; });
  }

 private:
  ComplexMatrix matrix_;
  ComplexMatrix square_;
  std::vector<Eigenspace> spaces_;
};

/// Outcome probabilities of a measurement.
class ProbabilityDistribution {
 public:
  explicit ProbabilityDistribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {
    if (p_.empty()) throw Error(ErrorKind::InvalidParameter, "empty probability distribution");
    double sum = 0.0;
    for (auto& v : p_) {
      if (!std::isfinite(v) || v < -1e-12) {
        throw Error(ErrorKind::InvalidParameter, "probability " + std::to_string(v) + " out of range");
      }
      v = std::max(v, 0.0);
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorKind::InvalidParameter, "probabilities sum to " + std::to_string(sum));
    }
  }

  std::span<const double> values() const { return p_; }
  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }

  double power_sum(double q) const {
    double s = 0.0;
    for (double v : p_) s += std::pow(v, q);
    return s;
  }

 private:
  std::vector<double> p_;
};

/// A criterion evaluated on one state. `detected` means the separability
/// bound is strictly violated, i.e. the state is certified entangled.
struct CriterionVerdict {
  double value = 0.0;
  double threshold = 0.0;
  bool detected = false;
  std::string criterion_id;
};

inline CriterionVerdict make_verdict(double value, double threshold, std::string id) {
  return {value, threshold, value < threshold, std::move(id)};
}

namespace detail {

inline void require_dim(const DensityMatrix& rho, std::size_t dim, const char* what) {
  if (rho.dim() != dim) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": state dimension " + std::to_string(rho.dim()) + " vs " + std::to_string(dim));
  }
}

inline void require_two_qubit(const DensityMatrix& rho, const char* what) {
  if (!rho.is_two_qubit()) throw Error(ErrorKind::DimensionMismatch, std::string(what) + " needs a 2x2 bipartite state");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Variances and local uncertainty relations

/// <M^2> - <M>^2, clamped at zero.
inline double variance(const DensityMatrix& rho, const Observable& m) {
  detail::require_dim(rho, m.dim(), "variance");
  const double mean = trace_of_product(rho.matrix(), m.matrix()).real();
  const double second = trace_of_product(rho.matrix(), m.square()).real();
  return std::max(second - mean * mean, 0.0);
}

inline double variance_sum(const DensityMatrix& rho, std::span<const Observable> observables) {
  double sum = 0.0;
  for (const auto& m : observables) sum += variance(rho, m);
  return sum;
}

/// sum_i var(M_i) against a bound every separable state satisfies.
inline CriterionVerdict lur_value(const DensityMatrix& rho, std::span<const Observable> observables, double bound) {
  return make_verdict(variance_sum(rho, observables), bound, "lur");
}

/// M_i = s_i (x) 1 + 1 (x) s_i for i = x, y, z.
inline std::span<const Observable> collective_paulis() {
  static const std::vector<Observable> ops = [] {
    std::vector<Observable> out;
    const auto id = pauli::identity();
    for (const auto& s : pauli::all()) out.emplace_back(kron(s, id) + kron(id, s));
    return out;
  }();
  return ops;
}

/// LUR built from the single-qubit relation sum_i var(s_i) >= 2; separable states obey sum_i var(M_i) >= 4.
inline CriterionVerdict pauli_lur(const DensityMatrix& rho) {
  detail::require_two_qubit(rho, "pauli_lur");
  auto verdict = lur_value(rho, collective_paulis(), 4.0);
  verdict.criterion_id = "pauli_lur";
  return verdict;
}

namespace detail {

inline std::array<double, 3> pauli_correlations(const DensityMatrix& rho) {
  std::array<double, 3> out{};
  const auto ops = pauli::all();
  for (std::size_t i = 0; i < 3; ++i) out[i] = trace_of_product(rho.matrix(), kron(ops[i], ops[i])).real();
  return out;
}

inline std::array<double, 3> collective_means(const DensityMatrix& rho) {
  std::array<double, 3> out{};
  const auto ms = collective_paulis();
  for (std::size_t i = 0; i < 3; ++i) out[i] = trace_of_product(rho.matrix(), ms[i].matrix()).real();
  return out;
}

}  // namespace detail

/// <1 + sx sx + sy sy + sz sz>; negative only for entangled states.
inline double linear_witness_value(const DensityMatrix& rho) {
  detail::require_two_qubit(rho, "linear_witness_value");
  const auto c = detail::pauli_correlations(rho);
  return 1.0 + c[0] + c[1] + c[2];
}

/// Linear witness minus (1/2) sum_i <M_i>^2. Equals (sum_i var(M_i) - 4) / 2,
/// so it is the Pauli LUR rewritten as a nonlinear witness.
inline CriterionVerdict nonlinear_witness_value(const DensityMatrix& rho) {
  const double linear = linear_witness_value(rho);
  const auto m = detail::collective_means(rho);
  const double squares = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
  return make_verdict(linear - 0.5 * squares, 0.0, "nonlinear_witness");
}

inline CriterionVerdict linear_witness(const DensityMatrix& rho) {
  return make_verdict(linear_witness_value(rho), 0.0, "linear_witness");
}

// ---------------------------------------------------------------------------
// Entropies

/// p_i = Tr(rho X_i), one entry per distinct eigenvalue in ascending order.
inline ProbabilityDistribution measurement_distribution(const DensityMatrix& rho, const Observable& m) {
  detail::require_dim(rho, m.dim(), "measurement_distribution");
  std::vector<double> p;
  p.reserve(m.eigenspaces().size());
  for (const auto& space : m.eigenspaces()) p.push_back(trace_of_product(rho.matrix(), space.projector).real());
  return ProbabilityDistribution(std::move(p));
}

inline double shannon_entropy(const ProbabilityDistribution& p) {
  double s = 0.0;
  for (double v : p.values())
    if (v > 0.0) s -= v * std::log(v);
  return std::max(s, 0.0);
}

inline double tsallis_entropy(const ProbabilityDistribution& p, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw Error(ErrorKind::InvalidParameter, "Tsallis parameter q = " + std::to_string(q));
  if (q == 1.0) return shannon_entropy(p);
  return std::max((1.0 - p.power_sum(q)) / (q - 1.0), 0.0);
}

/// Entropic functions usable with the entropic criteria.
struct ShannonEntropy {
  double operator()(const ProbabilityDistribution& p) const { return shannon_entropy(p); }
};

struct TsallisEntropy {
  double q = 2.0;
  double operator()(const ProbabilityDistribution& p) const { return tsallis_entropy(p, q); }
};

/// -2 ln max_{i,j} |<m_i|n_j>| for two nondegenerate observables.
inline double maassen_bound(const Observable& m, const Observable& n) {
  if (!m.is_nondegenerate() || !n.is_nondegenerate()) {
    throw Error(ErrorKind::DegenerateObservable, "Maassen-Uffink bound needs nondegenerate observables");
  }
  if (m.dim() != n.dim()) throw Error(ErrorKind::DimensionMismatch, "observables act on different spaces");
  double overlap = 0.0;
  for (const auto& a : m.eigenspaces())
    for (const auto& b : n.eigenspaces()) overlap = std::max(overlap, std::abs(inner(a.basis[0], b.basis[0])));
  return std::max(-2.0 * std::log(overlap), 0.0);
}

/// A_i (x) B_i for the entropic criterion on two observables. Both factors
/// must be Hermitian with no zero eigenvalue.
struct ProductObservable {
  ComplexMatrix alice;
  ComplexMatrix bob;
};

namespace detail {

inline void require_full_rank(const ComplexMatrix& m, const char* side) {
  const auto values = hermitian_eigen(m).values;
  for (double v : values)
    if (std::abs(v) <= kDegeneracyTolerance) {
      throw Error(ErrorKind::InvalidParameter, std::string(side) + " factor has a zero eigenvalue");
    }
}

inline Observable joint_observable(const ProductObservable& p, const DensityMatrix& rho) {
  if (p.alice.dim() != rho.dims().alice || p.bob.dim() != rho.dims().bob) {
    throw Error(ErrorKind::DimensionMismatch, "product observable factors do not match the state's subsystems");
  }
  require_full_rank(p.alice, "Alice");
  require_full_rank(p.bob, "Bob");
  return Observable(kron(p.alice, p.bob));
}

}  // namespace detail

/// S(A_1 (x) B_1) + S(A_2 (x) B_2) against a constant c that must come from a
/// valid single-party relation S(A_1) + S(A_2) >= c (or the same for B). The
/// joint observables may be degenerate; outcomes are grouped by eigenspace.
/// Relaxing the nonzero-eigenvalue requirement is unvalidated.
template <typename Entropy = ShannonEntropy>
CriterionVerdict eur_criterion3(const DensityMatrix& rho, const ProductObservable& first,
                                const ProductObservable& second, double c, Entropy entropy = {}) {
  const Observable m1 = detail::joint_observable(first, rho);
  const Observable m2 = detail::joint_observable(second, rho);
  const double value = entropy(measurement_distribution(rho, m1)) + entropy(measurement_distribution(rho, m2));
  return make_verdict(value, c, "eur_criterion3");
}

namespace detail {

struct SchmidtBoundTerms {
  double count;      // floor(1/c)
  double remainder;  // 1 - floor(1/c) c
};

inline SchmidtBoundTerms schmidt_bound_terms(double c) {
  const double count = std::floor(1.0 / c);
  return {count, std::max(1.0 - count * c, 0.0)};
}

inline void check_bound_parameters(double c, double q) {
  if (!(c > 0.0 && c < 1.0)) throw Error(ErrorKind::InvalidParameter, "Schmidt bound c = " + std::to_string(c));
  if (!(q > 0.0) || !std::isfinite(q)) throw Error(ErrorKind::InvalidParameter, "Tsallis parameter q = " + std::to_string(q));
}

}  // namespace detail

/// Lower bound on S^T_q(M) for separable states when every eigenvector of M
/// has squared Schmidt coefficients at most c:
///   (1 - floor(1/c) c^q - (1 - floor(1/c) c)^q) / (q - 1),
/// with the Shannon limit floor(1/c) (-c ln c) - r ln r at q = 1.
inline double criterion4_bound(double c, double q) {
  detail::check_bound_parameters(c, q);
  const auto [count, r] = detail::schmidt_bound_terms(c);
  if (q == 1.0) {
    const double tail = r > 0.0 ? r * std::log(r) : 0.0;
    return count * (-c * std::log(c)) - tail;
  }
  return (1.0 - count * std::pow(c, q) - std::pow(r, q)) / (q - 1.0);
}

namespace detail {

// S^T_q(p) < bound, decided on the power sums so that large q does not
// cancel both sides to 1/(q-1) in floating point.
inline bool tsallis_violates(const ProbabilityDistribution& p, double c, double q) {
  if (q == 1.0) return shannon_entropy(p) < criterion4_bound(c, q);
  const auto [count, r] = schmidt_bound_terms(c);
  const double separable_power_sum = count * std::pow(c, q) + std::pow(r, q);
  const double power_sum = p.power_sum(q);
  return q > 1.0 ? power_sum > separable_power_sum : power_sum < separable_power_sum;
}

inline CriterionVerdict tsallis_verdict(const ProbabilityDistribution& p, double c, double q, std::string id) {
  CriterionVerdict v{tsallis_entropy(p, q), criterion4_bound(c, q), false, std::move(id)};
  v.detected = tsallis_violates(p, c, q);
  return v;
}

inline std::string q_label(double q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", q);
  return buf;
}

}  // namespace detail

/// Largest squared Schmidt coefficient over all eigenvectors of a
/// nondegenerate observable on a bipartite space.
inline double max_squared_schmidt(const Observable& m, Dims dims) {
  if (!m.is_nondegenerate()) throw Error(ErrorKind::DegenerateObservable, "observable has a degenerate eigenspace");
  double c = 0.0;
  for (const auto& space : m.eigenspaces()) {
    const auto coeffs = schmidt_coefficients(PureState::normalized(space.basis[0], dims));
    c = std::max(c, coeffs.front() * coeffs.front());
  }
  return c;
}

/// Tsallis entropic criterion for a nondegenerate observable with entangled
/// eigenvectors; c is taken from the eigenvectors' Schmidt coefficients.
inline CriterionVerdict criterion4(const DensityMatrix& rho, const Observable& m, double q) {
  const double c = max_squared_schmidt(m, rho.dims());
  if (!(c < 1.0 - 1e-12)) throw Error(ErrorKind::InvalidParameter, "observable has a product eigenvector (c = 1)");
  return detail::tsallis_verdict(measurement_distribution(rho, m), c, q, "criterion4_q=" + detail::q_label(q));
}

inline ProbabilityDistribution bell_distribution(const DensityMatrix& rho) {
  const auto p = bell_populations(rho);
  return ProbabilityDistribution({p.begin(), p.end()});
}

/// Tsallis criterion for an observable diagonal in the Bell basis (c = 1/2).
inline CriterionVerdict bell_tsallis_criterion(const DensityMatrix& rho, double q) {
  detail::require_two_qubit(rho, "bell_tsallis_criterion");
  return detail::tsallis_verdict(bell_distribution(rho), 0.5, q, "bell_tsallis_q=" + detail::q_label(q));
}

/// Same criterion evaluated directly on Bell-diagonal coordinates.
inline bool bell_tsallis_detects(const BellDiagonalCoords& coords, double q) {
  const auto p = bell_populations(coords);
  std::array<double, 4> clamped{};
  std::transform(p.begin(), p.end(), clamped.begin(), [](double v) { return std::max(v, 0.0); });
  return detail::tsallis_violates(ProbabilityDistribution({clamped.begin(), clamped.end()}), 0.5, q);
}

/// sum_i var(|BS_i><BS_i|) = 1 - sum_i p_i^2 against 1/2. On Bell-diagonal
/// states this is detection iff x^2 + y^2 + z^2 > 1.
inline CriterionVerdict bell_variance_criterion(const DensityMatrix& rho) {
  detail::require_two_qubit(rho, "bell_variance_criterion");
  const auto p = bell_populations(rho);
  double squares = 0.0;
  for (double v : p) squares += v * v;
  return make_verdict(1.0 - squares, 0.5, "bell_variance");
}

}  // namespace uwit
