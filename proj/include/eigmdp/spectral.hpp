#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "eigmdp/interval.hpp"

namespace eigmdp {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
/// Real symmetric (orthogonal kinds) or complex Hermitian matrix.
using SampledMatrix = std::variant<RealMatrix, ComplexMatrix>;

enum class SpectrumScale { raw, normalized };

/// Sorted real eigenvalues together with the scale they are expressed in.
/// Normalized means the raw Wigner eigenvalues divided by sqrt(n).
class Spectrum {
 public:
  Spectrum() = default;
  /// Takes ownership of the values; throws unless they are finite and
  /// sorted ascending.
  Spectrum(std::vector<double> values, SpectrumScale scale);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  SpectrumScale scale() const noexcept { return scale_; }

  /// The i-th smallest eigenvalue, 1-indexed.
  double eigenvalue(std::size_t i) const;

  /// values[i] / sqrt(n). Only defined for raw spectra.
  Spectrum normalized() const;

 private:
  std::vector<double> values_;
  SpectrumScale scale_ = SpectrumScale::raw;
};

/// All eigenvalues of a symmetric or Hermitian matrix, sorted, on the raw
/// scale. Throws std::invalid_argument for input that is not self-adjoint
/// within 1e-12 and NumericalError when the solver fails or the trace
/// identity is violated.
Spectrum eigenvalues(const RealMatrix& matrix);
Spectrum eigenvalues(const ComplexMatrix& matrix);
Spectrum eigenvalues(const SampledMatrix& matrix);

/// Number of eigenvalues inside the interval (closed left, open right).
std::size_t counting(const Spectrum& spectrum, const Interval& interval);
std::size_t counting(std::span<const double> sorted_values, const Interval& interval);

/// Checks N_[y,inf) <= n - i  <=>  lambda_i <= y. Throws when y coincides
/// with an eigenvalue.
bool duality_check(const Spectrum& spectrum, double y, std::size_t i);

}  // namespace eigmdp
