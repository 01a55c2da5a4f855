#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eigmdp/interval.hpp"

namespace eigmdp {

/// Psi_0(x), ..., Psi_max_degree(x) where
/// Psi_k(x) = exp(-x^2/4) He_k(x) / sqrt(sqrt(2 pi) k!), evaluated by the
/// normalized three-term recurrence with dynamic rescaling (no raw Hermite
/// values, no overflow, underflow only below 1e-300).
std::vector<double> oscillator_wavefunctions(std::size_t max_degree, double x);

/// K^(n)(x, y) = sum_{k<n} Psi_k(x) Psi_k(y): the GUE correlation kernel on
/// the raw eigenvalue scale.
double gue_kernel(std::size_t n, double x, double y);

struct QuadratureReport {
  std::size_t nodes = 0;        ///< nodes used at the accepted refinement level
  double box_lower = 0.0;       ///< truncation box [box_lower, box_upper]
  double box_upper = 0.0;
  int refinements = 0;          ///< number of panel halvings performed
  double stabilization_residual = 0.0;  ///< max eigenvalue change at the last halving
  bool complement_used = false;
};

/// Eigenvalues eta_k of the GUE kernel restricted to an interval (raw
/// scale). By the Bernoulli representation, the eigenvalue count in the
/// interval is a sum of independent Bernoulli(eta_k).
struct KernelRestriction {
  std::size_t n = 0;
  Interval interval = Interval::whole_line();
  std::vector<double> etas;  ///< ascending, clamped to [0, 1]
  QuadratureReport quadrature;

  double eta_sum() const noexcept;
};

/// Builds the n x n Gram matrix int_I Psi_j Psi_k by composite
/// Gauss-Legendre quadrature on the truncation box [-2 sqrt(n) - 4,
/// 2 sqrt(n) + 4], eigensolves it, and halves the panel length until the
/// eigenvalues move by less than 1e-8. Half-lines whose complement inside
/// the box is shorter are handled through 1 - eig(Gram of the complement).
KernelRestriction restrict_kernel(std::size_t n, const Interval& raw_interval);

/// Exact law of a sum of independent Bernoulli variables.
class PoissonBinomial {
 public:
  PoissonBinomial() = default;

  /// P(N = k) for k = 0..max_count().
  std::span<const double> pmf() const noexcept { return pmf_; }
  std::size_t max_count() const noexcept { return pmf_.empty() ? 0 : pmf_.size() - 1; }
  double probability(std::size_t k) const noexcept { return k < pmf_.size() ? pmf_[k] : 0.0; }

  /// sum eta and sum eta (1 - eta), computed from the parameters.
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  std::span<const double> etas() const noexcept { return etas_; }

  /// P(N >= k) and P(N <= k), summed from the far tail inward.
  double upper_tail(std::size_t k) const noexcept;
  double lower_tail(std::size_t k) const noexcept;

 private:
  friend PoissonBinomial poisson_binomial(std::span<const double> etas);

  std::vector<double> pmf_;
  std::vector<double> etas_;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

/// Sequential convolution, O(K^2). Parameters below 1e-12 are dropped and
/// parameters above 1 - 1e-12 shift the count deterministically.
PoissonBinomial poisson_binomial(std::span<const double> etas);

/// Exact law of N_I(W_n') for GUE, I given on the normalized scale.
PoissonBinomial counting_law_gue(std::size_t n, const Interval& normalized_interval);

/// K independent Bernoulli(eta) variables (a binomial law), for synthetic
/// profiles far too large for the O(K^2) convolution.
struct IdenticalBernoulli {
  std::uint64_t count = 0;
  double eta = 0.5;

  double mean() const noexcept { return static_cast<double>(count) * eta; }
  double variance() const noexcept { return static_cast<double>(count) * eta * (1.0 - eta); }
  /// log P(N = j) via log-gamma.
  double log_pmf(std::uint64_t j) const;
};

/// (1/a^2) log E exp(theta a^2 Z) for Z = (N - E N) / (a S), S^2 = Var N:
/// (1/a^2) [ sum log(1 + eta (e^{theta a / S} - 1)) - (theta a / S) sum eta ].
double exact_cgf(std::span<const double> etas, double theta, double a);
double exact_cgf(const PoissonBinomial& law, double theta, double a);
double exact_cgf(const IdenticalBernoulli& profile, double theta, double a);

/// (1/a^2) log P(Z >= xi) for xi > 0 and (1/a^2) log P(Z <= xi) for xi < 0,
/// with Z standardized as in exact_cgf. Returns -infinity when the event
/// has probability zero.
double exact_upper_rate(const PoissonBinomial& law, double xi, double a);
double exact_upper_rate(const IdenticalBernoulli& profile, double xi, double a);

}  // namespace eigmdp
