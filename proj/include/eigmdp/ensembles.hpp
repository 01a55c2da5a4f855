#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eigmdp/rng.hpp"
#include "eigmdp/spectral.hpp"

namespace eigmdp {

using Rational = boost::multiprecision::cpp_rational;

/// E X, E X^2, E X^3, E X^4 as exact rationals.
using ExactMoments = std::array<Rational, 4>;

enum class AtomKind { gaussian, rademacher, three_point_matched, custom_discrete };

std::string_view to_string(AtomKind kind);

/// Law of a single real matrix entry. All shipped kinds are centered and
/// either Gaussian or bounded, so the stretched-exponential tail condition
/// holds; custom atoms are the caller's responsibility.
class AtomDistribution {
 public:
  static AtomDistribution gaussian(double variance);
  /// +-sqrt(variance) with probability 1/2 each.
  static AtomDistribution rademacher(double variance);
  /// +-sqrt(3 variance) with probability 1/6 each and 0 with probability
  /// 2/3: agrees with N(0, variance) through the fourth moment.
  static AtomDistribution three_point_matched(double variance);
  /// Finite support with the given weights. Must be centered; exact moments
  /// are optional metadata.
  static AtomDistribution custom_discrete(std::vector<double> values, std::vector<double> weights,
                                          std::optional<ExactMoments> exact = std::nullopt);

  AtomKind kind() const noexcept { return kind_; }
  double variance() const noexcept { return variance_; }
  double standard_deviation() const noexcept;
  std::span<const double> support() const noexcept { return values_; }
  std::span<const double> weights() const noexcept { return weights_; }
  const std::optional<ExactMoments>& exact_moments() const noexcept { return exact_; }

  double sample(RngStream& rng) const;

 private:
  AtomDistribution() = default;

  AtomKind kind_ = AtomKind::gaussian;
  double variance_ = 1.0;
  std::vector<double> values_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  std::optional<ExactMoments> exact_;
};

/// The three-point atom matching a centered Gaussian of the given variance
/// through order four.
AtomDistribution make_matched_atom(double target_variance);

enum class EnsembleKind { gue, goe, gse, wigner_hermitian, wigner_symmetric, lue, covariance };

std::string_view to_string(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(std::string_view name);

/// True for kinds whose spectra follow the semicircle law after dividing by
/// sqrt(n).
bool is_wigner_kind(EnsembleKind kind);

/// Which random matrix family to draw.
///
/// Wigner kinds use the raw convention: off-diagonal entries have
/// E|Z|^2 = 1 (complex kinds put variance 1/2 in each of the real and
/// imaginary parts) and diagonal entries have variance 1 (Hermitian) or 2
/// (symmetric). Covariance kinds draw a p x n matrix X with E|X_ij|^2 = 1.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::gue;
  std::size_t n = 0;
  std::size_t p = 0;
  std::optional<AtomDistribution> offdiag_atom;
  std::optional<AtomDistribution> diag_atom;
  std::optional<AtomDistribution> entry_atom;
  std::uint64_t seed = 0;

  static EnsembleSpec gue(std::size_t n, std::uint64_t seed = 0);
  static EnsembleSpec goe(std::size_t n, std::uint64_t seed = 0);
  static EnsembleSpec gse(std::size_t n, std::uint64_t seed = 0);
  static EnsembleSpec lue(std::size_t p, std::size_t n, std::uint64_t seed = 0);
  static EnsembleSpec wigner_hermitian(std::size_t n, AtomDistribution offdiag_part,
                                       AtomDistribution diag, std::uint64_t seed = 0);
  static EnsembleSpec wigner_symmetric(std::size_t n, AtomDistribution offdiag,
                                       AtomDistribution diag, std::uint64_t seed = 0);
  /// Complex entries re + i im with re, im drawn from entry_part (variance 1/2).
  static EnsembleSpec covariance(std::size_t p, std::size_t n, AtomDistribution entry_part,
                                 std::uint64_t seed = 0);

  /// Throws std::invalid_argument on inconsistent sizes or atom variances.
  void validate() const;
};

/// Raw Wigner matrix M_n, or the already normalized covariance matrix
/// W = X^* X / n. Self-adjointness holds exactly. GSE is rejected: use
/// sample_gse_spectrum.
SampledMatrix sample_matrix(const EnsembleSpec& spec, RngStream& rng);

/// Superimposes sorted spectra of sizes n and n+1 and keeps the values at
/// 1-indexed positions 2, 4, ..., 2n.
std::vector<double> interlace_even(std::span<const double> smaller, std::span<const double> larger);

/// 2 N_I(interlaced) - N_I(smaller) - N_I(larger). Always in {-1, 0, 1},
/// since I picks a contiguous block of the merged sequence.
long interlacing_count_gap(std::span<const double> smaller, std::span<const double> larger,
                           const Interval& interval);

/// Values at 1-indexed positions 2, 4, ..., 2n of a sorted sequence of
/// length 2n+1.
std::vector<double> even_positions(std::span<const double> sorted_values);

/// Raw GUE_n spectrum as even(GOE_n u GOE_{n+1}).
Spectrum sample_gue_spectrum_via_interlacing(std::size_t n, RngStream& rng);

/// Raw GSE_n spectrum as even(GOE_{2n+1}) / sqrt(2).
Spectrum sample_gse_spectrum(std::size_t n, RngStream& rng);

enum class GueSampler { direct, interlaced };

/// Spectrum on the scale every statistic uses: Wigner kinds divided by
/// sqrt(n); covariance kinds as returned by sample_matrix.
Spectrum sample_normalized_spectrum(const EnsembleSpec& spec, RngStream& rng,
                                    GueSampler gue_sampler = GueSampler::direct);

}  // namespace eigmdp
