#include "eigmdp/montecarlo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eigmdp/dpp.hpp"
#include "eigmdp/laws.hpp"

namespace eigmdp {

std::vector<std::size_t> sample_counts(const EnsembleSpec& spec, const Interval& interval,
                                       std::size_t replicas, unsigned threads,
                                       GueSampler sampler) {
  return map_spectra(spec, replicas, threads, sampler,
                     [&](const Spectrum& s) { return counting(s, interval); });
}

std::vector<double> sample_eigenvalues(const EnsembleSpec& spec, std::size_t index,
                                       std::size_t replicas, unsigned threads,
                                       GueSampler sampler) {
  if (index == 0 || index > spec.n) throw std::out_of_range("sample_eigenvalues: index");
  return map_spectra(spec, replicas, threads, sampler,
                     [&](const Spectrum& s) { return s.eigenvalue(index); });
}

double propagated_slope_error(std::span<const double> x, std::span<const double> sigma) {
  if (x.size() != sigma.size() || x.size() < 2) {
    throw std::invalid_argument("propagated_slope_error: need matching points");
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double sxx = 0.0;
  for (double v : x) sxx += (v - mean) * (v - mean);
  double var = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double c = (x[k] - mean) / sxx;
    var += c * c * sigma[k] * sigma[k];
  }
  return std::sqrt(var);
}

CltComparison clt_compare(std::size_t n, const Interval& interval, std::size_t replicas,
                          std::uint64_t seed, unsigned threads, const MdpScaling& scaling) {
  if (n < 3) throw std::invalid_argument("clt_compare: requires n >= 3");
  CltComparison out;
  out.n = n;
  out.replicas = replicas;
  const PoissonBinomial law = counting_law_gue(n, interval);
  out.exact_mean = law.mean();
  out.exact_variance = law.variance();
  out.numerics_mean = static_cast<double>(n) * semicircle_measure(interval);
  out.numerics_variance = std::log(static_cast<double>(n)) / (2.0 * std::numbers::pi * std::numbers::pi);

  const auto counts = sample_counts(EnsembleSpec::gue(n, seed), interval, replicas, threads);
  std::vector<double> z, z_hat;
  z.reserve(counts.size());
  z_hat.reserve(counts.size());
  const double sd = std::sqrt(out.exact_variance);
  for (std::size_t c : counts) {
    const double count = static_cast<double>(c);
    z.push_back(standardized_counting(count, out.exact_mean, out.exact_variance, scaling));
    z_hat.push_back(numerics_counting(count, n, interval, scaling));
    if (std::abs(count - out.exact_mean) <= 2.0 * sd) {
      out.max_difference_within_two_sd =
          std::max(out.max_difference_within_two_sd, std::abs(z_hat.back() - z.back()));
    }
  }
  out.z = sample_moments(z);
  out.z_hat = sample_moments(z_hat);
  out.total_variation = total_variation(law.pmf(), counts);
  return out;
}

std::vector<BulkStatisticRow> bulk_statistic_sweep(const EnsembleSpec& spec,
                                                   const std::vector<std::size_t>& indices,
                                                   std::size_t replicas, unsigned threads,
                                                   const MdpScaling& scaling, GueSampler sampler,
                                                   BulkGuard guard) {
  if (!is_wigner_kind(spec.kind)) {
    throw std::invalid_argument("bulk_statistic_sweep: Wigner kinds only");
  }
  for (std::size_t i : indices) {
    // Validates every index before any sampling.
    (void)bulk_eigenvalue_statistic(0.0, i, spec.n, spec.kind, scaling, guard);
  }
  const auto per_replica = map_spectra(spec, replicas, threads, sampler, [&](const Spectrum& s) {
    std::vector<double> stats;
    stats.reserve(indices.size());
    for (std::size_t i : indices) {
      stats.push_back(bulk_eigenvalue_statistic(s.eigenvalue(i), i, spec.n, spec.kind, scaling, guard));
    }
    return stats;
  });
  std::vector<BulkStatisticRow> rows;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    std::vector<double> column;
    column.reserve(per_replica.size());
    for (const auto& r : per_replica) column.push_back(r[k]);
    rows.push_back({indices[k], classical_location(indices[k], spec.n), sample_moments(column)});
  }
  return rows;
}

CovarianceScan covariance_scan(const EnsembleSpec& spec, double p_over_n,
                               const std::vector<std::size_t>& sizes, double level,
                               std::size_t replicas, unsigned threads, const MdpScaling& scaling,
                               BulkGuard guard) {
  if (is_wigner_kind(spec.kind)) throw std::invalid_argument("covariance_scan: covariance kinds only");
  if (!(p_over_n >= 1.0)) throw std::invalid_argument("covariance_scan: requires p/n >= 1");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("covariance_scan: level in (0,1)");
  CovarianceScan scan;
  for (std::size_t n : sizes) {
    EnsembleSpec s = spec;
    s.n = n;
    s.p = static_cast<std::size_t>(std::llround(p_over_n * static_cast<double>(n)));
    s.seed = derive_seed(spec.seed, n);
    const MarchenkoPasturLaw law(s.p, n);
    CovarianceRow row;
    row.n = n;
    row.p = s.p;
    row.threshold = law.quantile(level);
    row.numerics_mean = static_cast<double>(n) * (1.0 - law.cdf(row.threshold));
    row.index = static_cast<std::size_t>(std::llround(level * static_cast<double>(n)));
    row.location = law.quantile(static_cast<double>(row.index) / static_cast<double>(n));
    (void)covariance_eigenvalue_statistic(row.location, row.index, law, scaling, guard);

    const Interval interval = Interval::at_least(row.threshold);
    const auto draws = map_spectra(s, replicas, threads, GueSampler::direct, [&](const Spectrum& sp) {
      return std::pair<double, double>{
          static_cast<double>(counting(sp, interval)),
          covariance_eigenvalue_statistic(sp.eigenvalue(row.index), row.index, law, scaling, guard)};
    });
    std::vector<double> counts, stats;
    for (const auto& [c, x] : draws) {
      counts.push_back(c);
      stats.push_back(x);
    }
    row.count = sample_moments(counts);
    row.statistic = sample_moments(stats);
    scan.rows.push_back(row);
  }
  if (scan.rows.size() >= 2) {
    std::vector<double> x, y, sigma;
    for (const auto& row : scan.rows) {
      x.push_back(std::log(static_cast<double>(row.n)));
      y.push_back(row.count.variance);
      sigma.push_back(row.count.variance_standard_error);
    }
    const LinearFit fit = linear_fit(x, y);
    scan.slope = fit.slope;
    scan.intercept = fit.intercept;
    scan.slope_standard_error = propagated_slope_error(x, sigma);
  }
  return scan;
}

}  // namespace eigmdp
