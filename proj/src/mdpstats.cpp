#include "eigmdp/mdpstats.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "eigmdp/montecarlo.hpp"

namespace eigmdp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_bulk_index(std::size_t i, std::size_t n, const BulkGuard& guard, const char* what) {
  if (n < 2 || i == 0 || i > n) {
    throw std::out_of_range(std::string(what) + ": index must satisfy 1 <= i <= n, n >= 2");
  }
  const double level = static_cast<double>(i) / static_cast<double>(n);
  if (level < guard.lower || level > guard.upper || level >= 1.0) {
    throw std::out_of_range(std::string(what) + ": index i/n outside the bulk window");
  }
}

void require_positive_scale(const MdpScaling& scaling) {
  if (!(scaling.a > 0.0) || !std::isfinite(scaling.a)) {
    throw std::invalid_argument("MdpScaling: a must be positive and finite");
  }
}

RateCurve make_curve(RateMethod method, double a, std::span<const double> xi_grid) {
  RateCurve curve;
  curve.method = method;
  curve.a = a;
  curve.xi.assign(xi_grid.begin(), xi_grid.end());
  for (double xi : xi_grid) {
    if (xi == 0.0 || !std::isfinite(xi)) {
      throw std::invalid_argument("rate curve: grid points must be finite and nonzero");
    }
    curve.target_rate.push_back(0.5 * xi * xi);
  }
  return curve;
}

template <class Law>
RateCurve exact_curve(const Law& law, const MdpScaling& scaling, std::span<const double> xi_grid) {
  require_positive_scale(scaling);
  if (!(law.variance() > 0.0)) throw std::domain_error("rate_curve_exact: degenerate law");
  RateCurve curve = make_curve(RateMethod::exact_pmf, scaling.a, xi_grid);
  for (double xi : xi_grid) {
    const double rate = exact_upper_rate(law, xi, scaling.a);
    curve.empirical_rate.push_back(rate);
    curve.ci_low.push_back(rate);
    curve.ci_high.push_back(rate);
    curve.tail_count.push_back(0);
    curve.flagged.push_back(!std::isfinite(rate));
  }
  return curve;
}

}  // namespace

MdpScaling::MdpScaling(double scale) : a(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("MdpScaling: a must be positive and finite");
  }
}

MdpScaling MdpScaling::for_variance(double scale, double variance) {
  MdpScaling s(scale);
  if (!(variance > 0.0)) throw std::invalid_argument("MdpScaling: variance must be positive");
  const double sd = std::sqrt(variance);
  s.regime_known = true;
  s.regime_satisfiable = sd >= kRegimeGap;
  s.within_regime = scale > 1.0 && scale < sd;
  return s;
}

double standardized_counting(double count, double mean, double variance, const MdpScaling& scaling) {
  require_positive_scale(scaling);
  if (!(variance > 0.0)) throw std::domain_error("standardized_counting: variance must be positive");
  return (count - mean) / (scaling.a * std::sqrt(variance));
}

double numerics_counting(double count, std::size_t n, const Interval& interval,
                         const MdpScaling& scaling) {
  require_positive_scale(scaling);
  if (n < 3) throw std::domain_error("numerics_counting: requires n >= 3");
  const double mass = semicircle_measure(interval);
  if (interval.is_empty() || !(mass > 0.0)) {
    throw std::domain_error("numerics_counting: interval carries no semicircle mass");
  }
  const double log_n = std::log(static_cast<double>(n));
  const double sd = std::sqrt(log_n / (2.0 * std::numbers::pi * std::numbers::pi));
  return (count - static_cast<double>(n) * mass) / (scaling.a * sd);
}

double bulk_prefactor(EnsembleKind kind, double t) {
  const double gap = std::max(0.0, 4.0 - t * t);
  switch (kind) {
    case EnsembleKind::gue:
    case EnsembleKind::wigner_hermitian:
      return std::sqrt(0.5 * gap);
    case EnsembleKind::goe:
    case EnsembleKind::wigner_symmetric:
      return 0.5 * std::sqrt(gap);
    case EnsembleKind::gse:
      return std::sqrt(gap);
    default:
      throw std::invalid_argument("bulk_prefactor: only Wigner kinds have a semicircle prefactor");
  }
}

double bulk_eigenvalue_statistic(double lambda, std::size_t i, std::size_t n, EnsembleKind kind,
                                 const MdpScaling& scaling, BulkGuard guard) {
  require_positive_scale(scaling);
  require_bulk_index(i, n, guard, "bulk_eigenvalue_statistic");
  const double t = classical_location(i, n);
  const double nn = static_cast<double>(n);
  return bulk_prefactor(kind, t) * (lambda - t) * nn / (scaling.a * std::sqrt(std::log(nn)));
}

double covariance_eigenvalue_statistic(double lambda, std::size_t i, const MarchenkoPasturLaw& law,
                                       const MdpScaling& scaling, BulkGuard guard) {
  require_positive_scale(scaling);
  const std::size_t n = law.n();
  require_bulk_index(i, n, guard, "covariance_eigenvalue_statistic");
  const double nn = static_cast<double>(n);
  const double t = law.quantile(static_cast<double>(i) / nn);
  return std::numbers::sqrt2 * std::numbers::pi * law.density(t) * (lambda - t) * nn /
         (scaling.a * std::sqrt(std::log(nn)));
}

std::string_view to_string(RateMethod method) {
  return method == RateMethod::exact_pmf ? "exact-pmf" : "monte-carlo";
}

RateCurve rate_curve_exact(const PoissonBinomial& law, const MdpScaling& scaling,
                           std::span<const double> xi_grid) {
  return exact_curve(law, scaling, xi_grid);
}

RateCurve rate_curve_exact(const IdenticalBernoulli& profile, const MdpScaling& scaling,
                           std::span<const double> xi_grid) {
  return exact_curve(profile, scaling, xi_grid);
}

RateCurve rate_curve_mc(std::span<const double> standardized_samples, const MdpScaling& scaling,
                        std::span<const double> xi_grid, double z) {
  require_positive_scale(scaling);
  if (standardized_samples.empty()) throw std::invalid_argument("rate_curve_mc: no samples");
  RateCurve curve = make_curve(RateMethod::monte_carlo, scaling.a, xi_grid);
  const std::size_t total = standardized_samples.size();
  curve.sample_count = total;
  const double a2 = scaling.a * scaling.a;
  for (double xi : xi_grid) {
    const double threshold = scaling.a * xi;
    std::size_t hits = 0;
    for (double s : standardized_samples) {
      if (xi > 0.0 ? s >= threshold : s <= threshold) ++hits;
    }
    curve.tail_count.push_back(hits);
    const bool flagged = hits < kMinTailCount;
    curve.flagged.push_back(flagged);
    if (flagged) {
      curve.empirical_rate.push_back(kNaN);
      curve.ci_low.push_back(kNaN);
      curve.ci_high.push_back(kNaN);
      continue;
    }
    const double frequency = static_cast<double>(hits) / static_cast<double>(total);
    const WilsonInterval band = wilson_interval(hits, total, z);
    curve.empirical_rate.push_back(std::log(frequency) / a2);
    curve.ci_low.push_back(std::log(band.low) / a2);
    curve.ci_high.push_back(std::log(band.high) / a2);
  }
  return curve;
}

VarianceScan variance_scan(const VarianceScanConfig& config) {
  if (config.sizes.empty()) throw std::invalid_argument("variance_scan: no sizes");
  for (std::size_t k = 1; k < config.sizes.size(); ++k) {
    if (config.sizes[k] <= config.sizes[k - 1]) {
      throw std::invalid_argument("variance_scan: sizes must be strictly ascending");
    }
  }
  const EnsembleKind kind = config.ensemble.kind;
  if (config.method == ScanMethod::exact && kind != EnsembleKind::gue) {
    throw std::invalid_argument("variance_scan: the exact method is available for GUE only");
  }
  if (config.method == ScanMethod::monte_carlo && config.replicas < 2) {
    throw std::invalid_argument("variance_scan: Monte Carlo needs at least two replicas");
  }

  VarianceScan scan;
  for (std::size_t n : config.sizes) {
    VarianceRow row;
    row.n = n;
    if (config.method == ScanMethod::exact) {
      const PoissonBinomial law = counting_law_gue(n, config.interval);
      row.mean = law.mean();
      row.variance = law.variance();
    } else {
      EnsembleSpec spec = config.ensemble;
      spec.n = n;
      spec.seed = derive_seed(config.ensemble.seed, n);
      if (!is_wigner_kind(kind)) {
        spec.p = static_cast<std::size_t>(std::llround(config.p_over_n * static_cast<double>(n)));
        row.p = spec.p;
      }
      const auto counts =
          sample_counts(spec, config.interval, config.replicas, config.threads, config.gue_sampler);
      std::vector<double> values(counts.begin(), counts.end());
      const SampleMoments m = sample_moments(values);
      row.mean = m.mean;
      row.variance = m.variance;
      row.mean_standard_error = m.mean_standard_error;
      row.variance_standard_error = m.variance_standard_error;
    }
    scan.rows.push_back(row);
  }

  if (scan.rows.size() >= 2) {
    std::vector<double> x, y, sigma;
    for (const auto& row : scan.rows) {
      x.push_back(std::log(static_cast<double>(row.n)));
      y.push_back(row.variance);
      sigma.push_back(row.variance_standard_error);
    }
    const LinearFit fit = linear_fit(x, y);
    scan.slope = fit.slope;
    scan.intercept = fit.intercept;
    scan.slope_standard_error =
        config.method == ScanMethod::exact ? 0.0 : propagated_slope_error(x, sigma);
  }
  return scan;
}

MomentReport moment_match_report(const AtomDistribution& atom, const Rational& target_variance) {
  if (!atom.exact_moments()) {
    throw std::invalid_argument("moment_match_report: atom carries no exact moment metadata");
  }
  MomentReport report;
  report.atom = *atom.exact_moments();
  report.gaussian = ExactMoments{Rational(0), target_variance, Rational(0),
                                 3 * target_variance * target_variance};
  report.pass = true;
  for (std::size_t k = 0; k < 4; ++k) {
    report.matches[k] = report.atom[k] == report.gaussian[k];
    report.pass = report.pass && report.matches[k];
  }
  return report;
}

}  // namespace eigmdp
