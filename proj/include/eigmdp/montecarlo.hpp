#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "eigmdp/diagnostics.hpp"
#include "eigmdp/ensembles.hpp"
#include "eigmdp/interval.hpp"
#include "eigmdp/mdpstats.hpp"
#include "eigmdp/parallel.hpp"

namespace eigmdp {

/// Applies fn to the normalized spectrum of every replica. Replica r draws
/// from RngStream::substream(spec.seed, r), so the output is independent of
/// the worker count.
template <class Fn>
auto map_spectra(const EnsembleSpec& spec, std::size_t replicas, unsigned threads,
                 GueSampler sampler, Fn fn) {
  spec.validate();
  return run_replicas(replicas, threads, [&](std::size_t r) {
    RngStream rng = RngStream::substream(spec.seed, r);
    return fn(sample_normalized_spectrum(spec, rng, sampler));
  });
}

/// N_I of each replica (I on the normalized scale).
std::vector<std::size_t> sample_counts(const EnsembleSpec& spec, const Interval& interval,
                                       std::size_t replicas, unsigned threads,
                                       GueSampler sampler = GueSampler::direct);

/// lambda_index (1-indexed, normalized scale) of each replica.
std::vector<double> sample_eigenvalues(const EnsembleSpec& spec, std::size_t index,
                                       std::size_t replicas, unsigned threads,
                                       GueSampler sampler = GueSampler::direct);

/// Exact-law versus Monte Carlo comparison of the two GUE counting
/// statistics: Z (exact centering) and Z-hat (semicircle numerics).
struct CltComparison {
  std::size_t n = 0;
  std::size_t replicas = 0;
  double exact_mean = 0.0;
  double exact_variance = 0.0;
  double numerics_mean = 0.0;      ///< n rho_sc(I)
  double numerics_variance = 0.0;  ///< log n / (2 pi^2)
  SampleMoments z;
  SampleMoments z_hat;
  double max_difference_within_two_sd = 0.0;  ///< max |Z-hat - Z| over |N - mean| <= 2 sd
  double total_variation = 0.0;               ///< Monte Carlo law vs exact law
};

CltComparison clt_compare(std::size_t n, const Interval& interval, std::size_t replicas,
                          std::uint64_t seed, unsigned threads, const MdpScaling& scaling);

struct BulkStatisticRow {
  std::size_t index = 0;
  double location = 0.0;
  SampleMoments statistic;
};

/// Bulk eigenvalue statistic at several indices from shared draws.
/// Wigner kinds only.
std::vector<BulkStatisticRow> bulk_statistic_sweep(const EnsembleSpec& spec,
                                                   const std::vector<std::size_t>& indices,
                                                   std::size_t replicas, unsigned threads,
                                                   const MdpScaling& scaling,
                                                   GueSampler sampler = GueSampler::direct,
                                                   BulkGuard guard = {});

struct CovarianceRow {
  std::size_t n = 0;
  std::size_t p = 0;
  double threshold = 0.0;        ///< t = G^{-1}(level): counting interval [t, inf)
  double numerics_mean = 0.0;    ///< n (1 - G(t))
  SampleMoments count;
  std::size_t index = 0;         ///< eigenvalue index round(level n)
  double location = 0.0;         ///< G^{-1}(index / n)
  SampleMoments statistic;       ///< covariance eigenvalue statistic
};

struct CovarianceScan {
  std::vector<CovarianceRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_standard_error = 0.0;
};

/// Covariance-matrix counterpart of the variance scan: for each n, counts
/// in [G^{-1}(level), inf) and the bulk eigenvalue statistic at index
/// round(level n), from shared draws. `spec` must be a covariance kind.
CovarianceScan covariance_scan(const EnsembleSpec& spec, double p_over_n,
                               const std::vector<std::size_t>& sizes, double level,
                               std::size_t replicas, unsigned threads, const MdpScaling& scaling,
                               BulkGuard guard = {});

/// Slope error of an ordinary least-squares fit from per-point sigmas.
double propagated_slope_error(std::span<const double> x, std::span<const double> sigma);

}  // namespace eigmdp
