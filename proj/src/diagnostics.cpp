#include "eigmdp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eigmdp {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_survival(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges slowly; Q is 1 to double precision
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_one_sample: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  return {d, kolmogorov_survival((root + 0.12 + 0.11 / root) * d)};
}

KsResult ks_two_sample(std::span<const double> first, std::span<const double> second) {
  if (first.empty() || second.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> a(first.begin(), first.end());
  std::vector<double> b(second.begin(), second.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double effective = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((effective + 0.12 + 0.11 / effective) * d)};
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> ones(x.size(), 1.0);
  LinearFit fit = weighted_linear_fit(x, y, ones);
  // Replace the unit-sigma error by the residual-based one.
  if (x.size() > 2) {
    double sxx = 0.0;
    double mean_x = 0.0;
    for (double v : x) mean_x += v;
    mean_x /= static_cast<double>(x.size());
    double rss = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      sxx += (x[k] - mean_x) * (x[k] - mean_x);
      const double r = y[k] - fit.intercept - fit.slope * x[k];
      rss += r * r;
    }
    fit.slope_standard_error = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
  } else {
    fit.slope_standard_error = 0.0;
  }
  return fit;
}

LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> sigma) {
  if (x.size() != y.size() || x.size() != sigma.size() || x.size() < 2) {
    throw std::invalid_argument("linear_fit: need at least two matching points");
  }
  double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(sigma[k] > 0.0)) throw std::invalid_argument("linear_fit: sigmas must be positive");
    const double w = 1.0 / (sigma[k] * sigma[k]);
    sw += w;
    swx += w * x[k];
    swy += w * y[k];
    swxx += w * x[k] * x[k];
    swxy += w * x[k] * y[k];
  }
  const double det = sw * swxx - swx * swx;
  if (!(det > 0.0)) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = (sw * swxy - swx * swy) / det;
  fit.intercept = (swxx * swy - swx * swxy) / det;
  fit.slope_standard_error = std::sqrt(sw / det);
  return fit;
}

double total_variation(std::span<const double> pmf, std::span<const std::size_t> counts) {
  if (counts.empty()) throw std::invalid_argument("total_variation: no samples");
  std::size_t largest = pmf.size();
  for (std::size_t c : counts) largest = std::max(largest, c + 1);
  std::vector<double> empirical(largest, 0.0);
  for (std::size_t c : counts) empirical[c] += 1.0;
  const double n = static_cast<double>(counts.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < largest; ++k) {
    const double p = k < pmf.size() ? pmf[k] : 0.0;
    sum += std::abs(p - empirical[k] / n);
  }
  return 0.5 * sum;
}

SampleMoments sample_moments(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("sample_moments: need at least two samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : samples) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  SampleMoments out;
  out.mean = mean;
  out.variance = m2 / (n - 1.0);
  out.mean_standard_error = std::sqrt(out.variance / n);
  const double central2 = m2 / n;
  const double central4 = m4 / n;
  out.variance_standard_error = std::sqrt(std::max(0.0, central4 - central2 * central2) / n);
  return out;
}

}  // namespace eigmdp
