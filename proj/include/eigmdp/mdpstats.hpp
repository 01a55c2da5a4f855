#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eigmdp/diagnostics.hpp"
#include "eigmdp/dpp.hpp"
#include "eigmdp/ensembles.hpp"
#include "eigmdp/interval.hpp"
#include "eigmdp/laws.hpp"

namespace eigmdp {

/// Deviation scale a_n (speed a_n^2) plus a note on whether the moderate
/// regime 1 << a_n << sqrt(Var) can be reached at the current size.
struct MdpScaling {
  /// sqrt(Var) must exceed this for the regime to have room.
  static constexpr double kRegimeGap = 10.0;

  double a = 1.0;
  bool regime_known = false;
  bool regime_satisfiable = false;  ///< sqrt(variance) >= kRegimeGap
  bool within_regime = false;       ///< 1 < a < sqrt(variance)

  MdpScaling() = default;
  explicit MdpScaling(double scale);
  static MdpScaling for_variance(double scale, double variance);
};

/// Index window i/n in [lower, upper] accepted as bulk.
struct BulkGuard {
  double lower = 0.05;
  double upper = 0.95;
};

/// (N - mean) / (a sqrt(variance)).
double standardized_counting(double count, double mean, double variance, const MdpScaling& scaling);

/// (N - n rho_sc(I)) / (a sqrt(log n / (2 pi^2))), I on the normalized scale.
double numerics_counting(double count, std::size_t n, const Interval& interval,
                         const MdpScaling& scaling);

/// Kind-specific bulk prefactor at classical location t: sqrt((4 - t^2)/2)
/// for GUE (and Hermitian Wigner), sqrt(4 - t^2)/2 for GOE (and symmetric
/// Wigner), sqrt(4 - t^2) for GSE.
double bulk_prefactor(EnsembleKind kind, double t);

/// prefactor(t) (lambda_i - t) n / (a sqrt(log n)), t = t(i/n), lambda_i on
/// the normalized scale.
double bulk_eigenvalue_statistic(double lambda, std::size_t i, std::size_t n, EnsembleKind kind,
                                 const MdpScaling& scaling, BulkGuard guard = {});

/// sqrt(2) pi mu_{p,n}(t) (lambda_i - t) n / (a sqrt(log n)) with
/// t = G^{-1}(i/n) for the Marchenko-Pastur law of the given shape.
double covariance_eigenvalue_statistic(double lambda, std::size_t i, const MarchenkoPasturLaw& law,
                                       const MdpScaling& scaling, BulkGuard guard = {});

enum class RateMethod { exact_pmf, monte_carlo };

std::string_view to_string(RateMethod method);

/// Deviation rates (1/a^2) log P(Z >= xi) (xi > 0) or P(Z <= xi) (xi < 0)
/// against the Gaussian target xi^2/2.
struct RateCurve {
  RateMethod method = RateMethod::exact_pmf;
  std::size_t sample_count = 0;
  double a = 1.0;
  std::vector<double> xi;
  std::vector<double> empirical_rate;  ///< NaN where flagged
  std::vector<double> target_rate;     ///< xi^2 / 2
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<std::size_t> tail_count;
  std::vector<bool> flagged;  ///< tail count below the reporting threshold
};

RateCurve rate_curve_exact(const PoissonBinomial& law, const MdpScaling& scaling,
                           std::span<const double> xi_grid);
RateCurve rate_curve_exact(const IdenticalBernoulli& profile, const MdpScaling& scaling,
                           std::span<const double> xi_grid);

/// Monte Carlo rates from CLT-standardized samples (mean 0, variance 1 up
/// to estimation error); the event for grid point xi is sample >= a xi (or
/// <= a xi for negative xi). Rates are reported only when the tail count
/// reaches kMinTailCount, with Wilson bands at normal quantile z.
inline constexpr std::size_t kMinTailCount = 10;
RateCurve rate_curve_mc(std::span<const double> standardized_samples, const MdpScaling& scaling,
                        std::span<const double> xi_grid, double z = 3.0);

enum class ScanMethod { exact, monte_carlo };

struct VarianceScanConfig {
  EnsembleSpec ensemble;           ///< kind, atoms and master seed; n is overwritten
  double p_over_n = 1.0;           ///< covariance kinds: p = round(p_over_n * n)
  std::vector<std::size_t> sizes;  ///< ascending
  Interval interval = Interval::at_least(0.0);  ///< normalized scale
  ScanMethod method = ScanMethod::exact;
  std::size_t replicas = 1000;
  unsigned threads = 1;
  GueSampler gue_sampler = GueSampler::direct;
};

struct VarianceRow {
  std::size_t n = 0;
  std::size_t p = 0;
  double mean = 0.0;
  double variance = 0.0;
  double mean_standard_error = 0.0;
  double variance_standard_error = 0.0;
};

struct VarianceScan {
  std::vector<VarianceRow> rows;
  double slope = 0.0;  ///< d Var / d log n, ordinary least squares
  double intercept = 0.0;
  double slope_standard_error = 0.0;  ///< propagated Monte Carlo error (0 for exact)
};

/// Per-size mean and variance of N_I with a fitted slope against log n.
/// The exact method is available for GUE only.
VarianceScan variance_scan(const VarianceScanConfig& config);

struct MomentReport {
  ExactMoments atom;
  ExactMoments gaussian;
  std::array<bool, 4> matches{};
  bool pass = false;
};

/// Compares the atom's exact moments with those of N(0, target_variance)
/// through order four. Throws when the atom carries no exact moments.
MomentReport moment_match_report(const AtomDistribution& atom, const Rational& target_variance);

}  // namespace eigmdp
