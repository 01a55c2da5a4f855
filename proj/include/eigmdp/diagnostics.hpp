#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace eigmdp {

double normal_cdf(double x);
/// P(N(0,1) >= x) without cancellation for large x.
double normal_survival(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// sup |F_empirical - cdf| for arbitrary (unsorted) samples.
KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction).
KsResult ks_two_sample(std::span<const double> first, std::span<const double> second);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval for `successes` out of `trials` at normal quantile z.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_standard_error = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Weighted least squares with weights 1 / sigma_i^2; the slope standard
/// error comes from the supplied sigmas.
LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> sigma);

/// (1/2) sum |p_k - q_k| between a pmf and the empirical law of integer
/// counts.
double total_variation(std::span<const double> pmf, std::span<const std::size_t> counts);

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
  double mean_standard_error = 0.0;
  double variance_standard_error = 0.0;  ///< from the fourth central moment
};

SampleMoments sample_moments(std::span<const double> samples);

}  // namespace eigmdp
