#include "eigmdp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "eigmdp/errors.hpp"

namespace eigmdp {
namespace {

template <class Matrix>
void require_self_adjoint(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double tolerance = 1e-12 * scale;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = j; i < m.rows(); ++i) {
      if (std::abs(m(i, j) - Eigen::numext::conj(m(j, i))) > tolerance) {
        throw std::invalid_argument("eigenvalues: matrix is not self-adjoint");
      }
    }
  }
}

template <class Matrix>
Spectrum solve(const Matrix& m) {
  require_self_adjoint(m);
  if (m.rows() == 0) return Spectrum({}, SpectrumScale::raw);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalues: eigensolver did not converge");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::vector<double> values(ev.data(), ev.data() + ev.size());
  std::sort(values.begin(), values.end());

  double sum = 0.0;
  for (double v : values) sum += v;
  const double trace = std::real(m.trace());
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (std::abs(sum - trace) > 1e-8 * static_cast<double>(values.size()) * scale) {
    throw NumericalError("eigenvalues: eigenvalue sum departs from the trace");
  }
  return Spectrum(std::move(values), SpectrumScale::raw);
}

}  // namespace

Spectrum::Spectrum(std::vector<double> values, SpectrumScale scale)
    : values_(std::move(values)), scale_(scale) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("Spectrum: non-finite eigenvalue");
  }
  if (!std::is_sorted(values_.begin(), values_.end())) {
    throw std::invalid_argument("Spectrum: values must be sorted ascending");
  }
}

double Spectrum::eigenvalue(std::size_t i) const {
  if (i == 0 || i > values_.size()) throw std::out_of_range("Spectrum::eigenvalue: index");
  return values_[i - 1];
}

Spectrum Spectrum::normalized() const {
  if (scale_ != SpectrumScale::raw) {
    throw std::logic_error("Spectrum::normalized: spectrum is already normalized");
  }
  const double root = std::sqrt(static_cast<double>(values_.size()));
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [root](double v) { return v / root; });
  return Spectrum(std::move(out), SpectrumScale::normalized);
}

Spectrum eigenvalues(const RealMatrix& matrix) { return solve(matrix); }
Spectrum eigenvalues(const ComplexMatrix& matrix) { return solve(matrix); }

Spectrum eigenvalues(const SampledMatrix& matrix) {
  return std::visit([](const auto& m) { return eigenvalues(m); }, matrix);
}

std::size_t counting(std::span<const double> sorted_values, const Interval& interval) {
  if (interval.is_empty()) return 0;
  const auto first = std::lower_bound(sorted_values.begin(), sorted_values.end(), interval.lower());
  const auto last = std::lower_bound(first, sorted_values.end(), interval.upper());
  return static_cast<std::size_t>(last - first);
}

std::size_t counting(const Spectrum& spectrum, const Interval& interval) {
  return counting(spectrum.values(), interval);
}

bool duality_check(const Spectrum& spectrum, double y, std::size_t i) {
  const std::size_t n = spectrum.size();
  if (i == 0 || i > n) throw std::out_of_range("duality_check: index must satisfy 1 <= i <= n");
  const auto values = spectrum.values();
  if (std::binary_search(values.begin(), values.end(), y)) {
    throw std::invalid_argument("duality_check: y coincides with an eigenvalue");
  }
  const bool count_side = counting(spectrum, Interval::at_least(y)) <= n - i;
  const bool eigen_side = spectrum.eigenvalue(i) <= y;
  return count_side == eigen_side;
}

}  // namespace eigmdp
