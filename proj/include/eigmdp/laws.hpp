#pragma once

#include <cstddef>

#include "eigmdp/interval.hpp"

namespace eigmdp {

// Semicircle law on [-2, 2] with density (1/2pi) sqrt(4 - x^2).

double semicircle_density(double x);

/// Closed form 1/2 + t sqrt(4 - t^2) / (4 pi) + asin(t/2) / pi, clamped to
/// [0, 1] outside the support.
double semicircle_cdf(double t);

/// Inverse of semicircle_cdf on (0, 1); residual below 1e-12.
double semicircle_quantile(double x);

/// Semicircle mass of an interval.
double semicircle_measure(const Interval& interval);

/// Classical location t(i/n) of the i-th smallest eigenvalue (1-indexed).
/// The top index i = n maps to the right edge 2.
double classical_location(std::size_t i, std::size_t n);

/// Marchenko-Pastur law for p x n data (p >= n), with edges
/// alpha = (sqrt(p/n) - 1)^2 and beta = (sqrt(p/n) + 1)^2.
class MarchenkoPasturLaw {
 public:
  MarchenkoPasturLaw(std::size_t p, std::size_t n);

  std::size_t p() const noexcept { return p_; }
  std::size_t n() const noexcept { return n_; }
  double ratio() const noexcept { return ratio_; }
  double lower_edge() const noexcept { return alpha_; }
  double upper_edge() const noexcept { return beta_; }

  /// (1 / 2 pi x) sqrt((x - alpha)(beta - x)) on the open support, 0 elsewhere.
  double density(double x) const;

  /// Integral of the density from alpha to t, absolute accuracy 1e-10.
  double cdf(double t) const;

  /// Inverse of cdf on (0, 1), residual below 1e-10.
  double quantile(double x) const;

 private:
  std::size_t p_;
  std::size_t n_;
  double ratio_;
  double alpha_;
  double beta_;
};

}  // namespace eigmdp
