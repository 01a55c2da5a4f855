#include "eigmdp/laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eigmdp/errors.hpp"

namespace eigmdp {
namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": non-finite input");
}

// Newton iteration on a monotone CDF, falling back to bisection whenever the
// step leaves the current bracket or the density vanishes.
template <class Cdf, class Density>
double safeguarded_inverse(Cdf cdf, Density density, double target, double lo, double hi,
                           double start, double tolerance, const char* what) {
  double t = start;
  for (int iter = 0; iter < 100; ++iter) {
    const double residual = cdf(t) - target;
    if (residual == 0.0) return t;
    if (residual > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    const double d = density(t);
    double next = t - residual / d;
    if (!(d > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - t);
    t = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      break;
    }
  }
  if (!(std::abs(cdf(t) - target) <= tolerance)) {
    throw NumericalError(std::string(what) + ": quantile solver did not converge");
  }
  return t;
}

}  // namespace

double semicircle_density(double x) {
  require_finite(x, "semicircle_density");
  if (std::abs(x) >= 2.0) return 0.0;
  return std::sqrt((2.0 - x) * (2.0 + x)) / (2.0 * kPi);
}

double semicircle_cdf(double t) {
  require_finite(t, "semicircle_cdf");
  if (t <= -2.0) return 0.0;
  if (t >= 2.0) return 1.0;
  const double value =
      0.5 + t * std::sqrt((2.0 - t) * (2.0 + t)) / (4.0 * kPi) + std::asin(0.5 * t) / kPi;
  return std::clamp(value, 0.0, 1.0);
}

double semicircle_quantile(double x) {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error("semicircle_quantile: probability must lie in (0, 1)");
  }
  if (x == 0.5) return 0.0;
  return safeguarded_inverse(semicircle_cdf, semicircle_density, x, -2.0, 2.0, 4.0 * x - 2.0,
                             1e-12, "semicircle_quantile");
}

double semicircle_measure(const Interval& interval) {
  const auto cdf_at = [](double v) {
    if (v == -Interval::kInf) return 0.0;
    if (v == Interval::kInf) return 1.0;
    return semicircle_cdf(v);
  };
  return cdf_at(interval.upper()) - cdf_at(interval.lower());
}

double classical_location(std::size_t i, std::size_t n) {
  if (n == 0 || i == 0 || i > n) {
    throw std::out_of_range("classical_location: index must satisfy 1 <= i <= n");
  }
  if (i == n) return 2.0;
  return semicircle_quantile(static_cast<double>(i) / static_cast<double>(n));
}

MarchenkoPasturLaw::MarchenkoPasturLaw(std::size_t p, std::size_t n) : p_(p), n_(n) {
  if (n == 0 || p == 0) throw std::invalid_argument("MarchenkoPasturLaw: p and n must be positive");
  if (p < n) throw std::invalid_argument("MarchenkoPasturLaw: requires p >= n");
  ratio_ = static_cast<double>(p) / static_cast<double>(n);
  const double root = std::sqrt(ratio_);
  alpha_ = (root - 1.0) * (root - 1.0);
  beta_ = (root + 1.0) * (root + 1.0);
}

double MarchenkoPasturLaw::density(double x) const {
  require_finite(x, "MarchenkoPasturLaw::density");
  if (x <= alpha_ || x >= beta_) return 0.0;
  return std::sqrt((x - alpha_) * (beta_ - x)) / (2.0 * kPi * x);
}

double MarchenkoPasturLaw::cdf(double t) const {
  require_finite(t, "MarchenkoPasturLaw::cdf");
  if (t <= alpha_) return 0.0;
  if (t >= beta_) return 1.0;
  // Antiderivative of sqrt((x - a)(b - x)) / x with m = (a + b)/2,
  // h = (b - a)/2, g = sqrt(ab):
  //   R(x) + m asin((x - m)/h) - g asin((m x - ab)/(h x)).
  // At x = a both arcsines sit at -pi/2.
  const double m = 0.5 * (alpha_ + beta_);
  const double h = 0.5 * (beta_ - alpha_);
  const double g = std::sqrt(alpha_ * beta_);
  const double r = std::sqrt((t - alpha_) * (beta_ - t));
  const double first = std::asin(std::clamp((t - m) / h, -1.0, 1.0)) + 0.5 * kPi;
  double second = 0.0;
  if (g > 0.0) second = std::asin(std::clamp((m * t - alpha_ * beta_) / (h * t), -1.0, 1.0)) + 0.5 * kPi;
  const double value = (r + m * first - g * second) / (2.0 * kPi);
  return std::clamp(value, 0.0, 1.0);
}

double MarchenkoPasturLaw::quantile(double x) const {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error("MarchenkoPasturLaw::quantile: probability must lie in (0, 1)");
  }
  const auto cdf_fn = [this](double t) { return cdf(t); };
  const auto density_fn = [this](double t) { return density(t); };
  return safeguarded_inverse(cdf_fn, density_fn, x, alpha_, beta_,
                             alpha_ + x * (beta_ - alpha_), 1e-10, "MarchenkoPasturLaw::quantile");
}

}  // namespace eigmdp
