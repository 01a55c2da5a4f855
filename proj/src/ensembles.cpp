#include "eigmdp/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>

namespace eigmdp {
namespace {

void require_positive_variance(double variance, const char* what) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument(std::string(what) + ": variance must be positive and finite");
  }
}

void require_variance(const std::optional<AtomDistribution>& atom, double expected,
                      const char* role) {
  if (!atom) throw std::invalid_argument(std::string("EnsembleSpec: missing ") + role + " atom");
  if (std::abs(atom->variance() - expected) > 1e-12) {
    throw std::invalid_argument(std::string("EnsembleSpec: ") + role + " atom must have variance " +
                                std::to_string(expected));
  }
}

std::complex<double> complex_gaussian(RngStream& rng) {
  const double re = rng.normal();
  const double im = rng.normal();
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

RealMatrix goe_matrix(std::size_t n, RngStream& rng) {
  const auto size = static_cast<Eigen::Index>(n);
  RealMatrix m(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = rng.normal();
      m(i, j) = v;
      m(j, i) = v;
    }
    m(i, i) = M_SQRT2 * rng.normal();
  }
  return m;
}

ComplexMatrix covariance_from_data(const ComplexMatrix& x) {
  const double n = static_cast<double>(x.cols());
  ComplexMatrix w = (x.adjoint() * x) / n;
  ComplexMatrix hermitian = (w + w.adjoint()) * 0.5;
  return hermitian;
}

}  // namespace

std::string_view to_string(AtomKind kind) {
  switch (kind) {
    case AtomKind::gaussian: return "gaussian";
    case AtomKind::rademacher: return "rademacher";
    case AtomKind::three_point_matched: return "three-point-matched";
    case AtomKind::custom_discrete: return "custom-discrete";
  }
  return "unknown";
}

AtomDistribution AtomDistribution::gaussian(double variance) {
  require_positive_variance(variance, "AtomDistribution::gaussian");
  AtomDistribution atom;
  atom.kind_ = AtomKind::gaussian;
  atom.variance_ = variance;
  const Rational v(variance);
  atom.exact_ = ExactMoments{Rational(0), v, Rational(0), 3 * v * v};
  return atom;
}

AtomDistribution AtomDistribution::rademacher(double variance) {
  require_positive_variance(variance, "AtomDistribution::rademacher");
  const double a = std::sqrt(variance);
  auto atom = custom_discrete({-a, a}, {0.5, 0.5});
  atom.kind_ = AtomKind::rademacher;
  atom.variance_ = variance;
  // Support +-a with a^2 = variance: even moments are a^2 and a^4.
  const Rational a2(variance);
  atom.exact_ = ExactMoments{Rational(0), a2, Rational(0), a2 * a2};
  return atom;
}

AtomDistribution AtomDistribution::three_point_matched(double variance) {
  require_positive_variance(variance, "AtomDistribution::three_point_matched");
  const double a = std::sqrt(3.0 * variance);
  const double q = 1.0 / 6.0;
  auto atom = custom_discrete({-a, 0.0, a}, {q, 1.0 - 2.0 * q, q});
  atom.kind_ = AtomKind::three_point_matched;
  atom.variance_ = variance;
  // Moments from the structure: mass q at +-a with a^2 = 3 variance.
  const Rational q_exact(1, 6);
  const Rational a2 = 3 * Rational(variance);
  atom.exact_ = ExactMoments{Rational(0), 2 * q_exact * a2, Rational(0), 2 * q_exact * a2 * a2};
  return atom;
}

AtomDistribution AtomDistribution::custom_discrete(std::vector<double> values,
                                                   std::vector<double> weights,
                                                   std::optional<ExactMoments> exact) {
  if (values.empty() || values.size() != weights.size()) {
    throw std::invalid_argument("AtomDistribution::custom_discrete: support/weight size mismatch");
  }
  double total = 0.0;
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k]) || !(weights[k] >= 0.0)) {
      throw std::invalid_argument("AtomDistribution::custom_discrete: invalid support or weight");
    }
    total += weights[k];
    mean += weights[k] * values[k];
    second += weights[k] * values[k] * values[k];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("AtomDistribution::custom_discrete: weights must sum to 1");
  }
  if (std::abs(mean) > 1e-12) {
    throw std::invalid_argument("AtomDistribution::custom_discrete: atom must be centered");
  }
  require_positive_variance(second, "AtomDistribution::custom_discrete");

  AtomDistribution atom;
  atom.kind_ = AtomKind::custom_discrete;
  atom.variance_ = second;
  atom.cumulative_.resize(weights.size());
  std::partial_sum(weights.begin(), weights.end(), atom.cumulative_.begin());
  atom.values_ = std::move(values);
  atom.weights_ = std::move(weights);
  atom.exact_ = std::move(exact);
  return atom;
}

double AtomDistribution::standard_deviation() const noexcept { return std::sqrt(variance_); }

double AtomDistribution::sample(RngStream& rng) const {
  if (kind_ == AtomKind::gaussian) return std::sqrt(variance_) * rng.normal();
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto index = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                           values_.size() - 1);
  return values_[index];
}

AtomDistribution make_matched_atom(double target_variance) {
  return AtomDistribution::three_point_matched(target_variance);
}

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::gue: return "gue";
    case EnsembleKind::goe: return "goe";
    case EnsembleKind::gse: return "gse";
    case EnsembleKind::wigner_hermitian: return "wigner-hermitian";
    case EnsembleKind::wigner_symmetric: return "wigner-symmetric";
    case EnsembleKind::lue: return "lue";
    case EnsembleKind::covariance: return "covariance";
  }
  return "unknown";
}

EnsembleKind parse_ensemble_kind(std::string_view name) {
  for (auto kind : {EnsembleKind::gue, EnsembleKind::goe, EnsembleKind::gse,
                    EnsembleKind::wigner_hermitian, EnsembleKind::wigner_symmetric,
                    EnsembleKind::lue, EnsembleKind::covariance}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown ensemble kind '" + std::string(name) + "'");
}

bool is_wigner_kind(EnsembleKind kind) {
  return kind != EnsembleKind::lue && kind != EnsembleKind::covariance;
}

EnsembleSpec EnsembleSpec::gue(std::size_t n, std::uint64_t seed) {
  return {EnsembleKind::gue, n, 0, std::nullopt, std::nullopt, std::nullopt, seed};
}

EnsembleSpec EnsembleSpec::goe(std::size_t n, std::uint64_t seed) {
  return {EnsembleKind::goe, n, 0, std::nullopt, std::nullopt, std::nullopt, seed};
}

EnsembleSpec EnsembleSpec::gse(std::size_t n, std::uint64_t seed) {
  return {EnsembleKind::gse, n, 0, std::nullopt, std::nullopt, std::nullopt, seed};
}

EnsembleSpec EnsembleSpec::lue(std::size_t p, std::size_t n, std::uint64_t seed) {
  return {EnsembleKind::lue, n, p, std::nullopt, std::nullopt, std::nullopt, seed};
}

EnsembleSpec EnsembleSpec::wigner_hermitian(std::size_t n, AtomDistribution offdiag_part,
                                            AtomDistribution diag, std::uint64_t seed) {
  return {EnsembleKind::wigner_hermitian, n, 0, std::move(offdiag_part), std::move(diag),
          std::nullopt, seed};
}

EnsembleSpec EnsembleSpec::wigner_symmetric(std::size_t n, AtomDistribution offdiag,
                                            AtomDistribution diag, std::uint64_t seed) {
  return {EnsembleKind::wigner_symmetric, n, 0, std::move(offdiag), std::move(diag),
          std::nullopt, seed};
}

EnsembleSpec EnsembleSpec::covariance(std::size_t p, std::size_t n, AtomDistribution entry_part,
                                      std::uint64_t seed) {
  return {EnsembleKind::covariance, n, p, std::nullopt, std::nullopt, std::move(entry_part), seed};
}

void EnsembleSpec::validate() const {
  if (n == 0) throw std::invalid_argument("EnsembleSpec: dimension n must be positive");
  switch (kind) {
    case EnsembleKind::gue:
    case EnsembleKind::goe:
    case EnsembleKind::gse:
      return;
    case EnsembleKind::wigner_hermitian:
      require_variance(offdiag_atom, 0.5, "off-diagonal");
      require_variance(diag_atom, 1.0, "diagonal");
      return;
    case EnsembleKind::wigner_symmetric:
      require_variance(offdiag_atom, 1.0, "off-diagonal");
      require_variance(diag_atom, 2.0, "diagonal");
      return;
    case EnsembleKind::covariance:
      require_variance(entry_atom, 0.5, "entry");
      [[fallthrough]];
    case EnsembleKind::lue:
      if (p < n) throw std::invalid_argument("EnsembleSpec: covariance kinds require p >= n");
      return;
  }
}

SampledMatrix sample_matrix(const EnsembleSpec& spec, RngStream& rng) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  switch (spec.kind) {
    case EnsembleKind::gse:
      throw std::invalid_argument(
          "sample_matrix: GSE matrices are not sampled directly; use sample_gse_spectrum");
    case EnsembleKind::goe:
      return goe_matrix(spec.n, rng);
    case EnsembleKind::gue: {
      ComplexMatrix m(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
          const auto z = complex_gaussian(rng);
          m(i, j) = z;
          m(j, i) = std::conj(z);
        }
        m(i, i) = rng.normal();
      }
      return m;
    }
    case EnsembleKind::wigner_hermitian: {
      ComplexMatrix m(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
          const double re = spec.offdiag_atom->sample(rng);
          const double im = spec.offdiag_atom->sample(rng);
          m(i, j) = {re, im};
          m(j, i) = {re, -im};
        }
        m(i, i) = spec.diag_atom->sample(rng);
      }
      return m;
    }
    case EnsembleKind::wigner_symmetric: {
      RealMatrix m(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
          const double v = spec.offdiag_atom->sample(rng);
          m(i, j) = v;
          m(j, i) = v;
        }
        m(i, i) = spec.diag_atom->sample(rng);
      }
      return m;
    }
    case EnsembleKind::lue:
    case EnsembleKind::covariance: {
      const auto p = static_cast<Eigen::Index>(spec.p);
      ComplexMatrix x(p, n);
      for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (spec.kind == EnsembleKind::lue) {
            x(i, j) = complex_gaussian(rng);
          } else {
            const double re = spec.entry_atom->sample(rng);
            const double im = spec.entry_atom->sample(rng);
            x(i, j) = {re, im};
          }
        }
      }
      return covariance_from_data(x);
    }
  }
  throw std::logic_error("sample_matrix: unhandled ensemble kind");
}

std::vector<double> interlace_even(std::span<const double> smaller,
                                   std::span<const double> larger) {
  if (larger.size() != smaller.size() + 1) {
    throw std::invalid_argument("interlace_even: sizes must be n and n+1");
  }
  if (!std::is_sorted(smaller.begin(), smaller.end()) ||
      !std::is_sorted(larger.begin(), larger.end())) {
    throw std::invalid_argument("interlace_even: inputs must be sorted ascending");
  }
  std::vector<double> merged(smaller.size() + larger.size());
  std::merge(smaller.begin(), smaller.end(), larger.begin(), larger.end(), merged.begin());
  return even_positions(merged);
}

std::vector<double> even_positions(std::span<const double> sorted_values) {
  if (sorted_values.size() % 2 != 1) {
    throw std::invalid_argument("even_positions: expected an odd number of values");
  }
  std::vector<double> out;
  out.reserve(sorted_values.size() / 2);
  for (std::size_t k = 1; k < sorted_values.size(); k += 2) out.push_back(sorted_values[k]);
  return out;
}

long interlacing_count_gap(std::span<const double> smaller, std::span<const double> larger,
                           const Interval& interval) {
  const auto even = interlace_even(smaller, larger);
  const auto count = [&](std::span<const double> v) { return static_cast<long>(counting(v, interval)); };
  return 2 * count(even) - count(smaller) - count(larger);
}

Spectrum sample_gue_spectrum_via_interlacing(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_gue_spectrum_via_interlacing: n must be >= 1");
  const Spectrum a = eigenvalues(goe_matrix(n, rng));
  const Spectrum b = eigenvalues(goe_matrix(n + 1, rng));
  return Spectrum(interlace_even(a.values(), b.values()), SpectrumScale::raw);
}

Spectrum sample_gse_spectrum(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_gse_spectrum: n must be >= 1");
  const Spectrum y = eigenvalues(goe_matrix(2 * n + 1, rng));
  std::vector<double> x = even_positions(y.values());
  for (double& v : x) v *= M_SQRT1_2;
  return Spectrum(std::move(x), SpectrumScale::raw);
}

Spectrum sample_normalized_spectrum(const EnsembleSpec& spec, RngStream& rng,
                                    GueSampler gue_sampler) {
  spec.validate();
  switch (spec.kind) {
    case EnsembleKind::gse:
      return sample_gse_spectrum(spec.n, rng).normalized();
    case EnsembleKind::gue:
      if (gue_sampler == GueSampler::interlaced) {
        return sample_gue_spectrum_via_interlacing(spec.n, rng).normalized();
      }
      return eigenvalues(sample_matrix(spec, rng)).normalized();
    case EnsembleKind::lue:
    case EnsembleKind::covariance: {
      const Spectrum s = eigenvalues(sample_matrix(spec, rng));
      return Spectrum(std::vector<double>(s.values().begin(), s.values().end()),
                      SpectrumScale::normalized);
    }
    default:
      return eigenvalues(sample_matrix(spec, rng)).normalized();
  }
}

}  // namespace eigmdp
