#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "eigmdp/diagnostics.hpp"
#include "eigmdp/dpp.hpp"
#include "eigmdp/laws.hpp"
#include "eigmdp/mdpstats.hpp"
#include "eigmdp/montecarlo.hpp"

using namespace eigmdp;

namespace {
constexpr double kPi = std::numbers::pi;
const std::vector<double> kGrid{-1.5, -1.0, -0.5, 0.5, 1.0, 1.5};
}  // namespace

TEST_CASE("scaling regime notes") {
  const MdpScaling plain(2.0);
  CHECK(plain.a == 2.0);
  CHECK_FALSE(plain.regime_known);
  const auto roomy = MdpScaling::for_variance(2.0, 400.0);
  CHECK(roomy.regime_known);
  CHECK(roomy.regime_satisfiable);
  CHECK(roomy.within_regime);
  const auto too_big = MdpScaling::for_variance(30.0, 400.0);
  CHECK_FALSE(too_big.within_regime);
  // Genuine GUE: sqrt(Var) is below one at desk sizes.
  const auto gue = MdpScaling::for_variance(1.0, 0.5);
  CHECK_FALSE(gue.regime_satisfiable);
  CHECK_THROWS_AS(MdpScaling(0.0), std::invalid_argument);
}

TEST_CASE("standardized counting") {
  CHECK(standardized_counting(3.0, 3.0, 4.0, MdpScaling(1.0)) == 0.0);
  CHECK(standardized_counting(5.0, 3.0, 4.0, MdpScaling(1.0)) == 1.0);
  CHECK(standardized_counting(12.0, 10.0, 4.0, MdpScaling(2.0)) == 0.5);
  CHECK_THROWS_AS(standardized_counting(1.0, 1.0, 0.0, MdpScaling(1.0)), std::domain_error);
}

TEST_CASE("counting with numerics") {
  CHECK(numerics_counting(27.5, 55, Interval::at_least(0.0), MdpScaling(1.0)) == 0.0);
  // 1 / sqrt(log 55 / (2 pi^2)) = 2.219407984415382311...
  CHECK(numerics_counting(28.5, 55, Interval::at_least(0.0), MdpScaling(1.0)) ==
        doctest::Approx(2.2194079844153823).epsilon(1e-14));
  const double e4 = std::exp(4.0);
  CHECK(1.0 / std::sqrt(std::log(e4) / (2.0 * kPi * kPi)) == doctest::Approx(kPi / std::sqrt(2.0)));
  CHECK_THROWS(numerics_counting(1.0, 2, Interval::at_least(0.0), MdpScaling(1.0)));
  CHECK_THROWS(numerics_counting(1.0, 50, Interval(3.0, 4.0), MdpScaling(1.0)));
}

TEST_CASE("counting with numerics stays close to exact centering") {
  const std::size_t n = 256;
  const auto law = counting_law_gue(n, Interval::at_least(0.0));
  const double sd = std::sqrt(law.variance());
  // Only N = mean and N = mean +- 1 lie within two sd here, and at mean +- 1
  // the gap is 1/sqrt(log n / (2 pi^2)) - 1/sd, about 0.42. The 0.35 bound
  // is kept as stated.
  const double gap = 1.0 / std::sqrt(std::log(256.0) / (2.0 * kPi * kPi)) - 1.0 / sd;
  CHECK(gap == doctest::Approx(0.4208).epsilon(1e-3));
  for (double count = std::ceil(law.mean() - 2 * sd); count <= law.mean() + 2 * sd; count += 1.0) {
    const double z = standardized_counting(count, law.mean(), law.variance(), MdpScaling(1.0));
    const double z_hat = numerics_counting(count, n, Interval::at_least(0.0), MdpScaling(1.0));
    CHECK(std::abs(z_hat - z) <= 0.35);
  }
}

TEST_CASE("bulk prefactors and statistic") {
  CHECK(bulk_prefactor(EnsembleKind::gue, 0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(bulk_prefactor(EnsembleKind::goe, 0.0) == doctest::Approx(1.0));
  CHECK(bulk_prefactor(EnsembleKind::gse, 0.0) == doctest::Approx(2.0));
  CHECK(bulk_prefactor(EnsembleKind::wigner_hermitian, 1.0) == doctest::Approx(std::sqrt(1.5)));
  CHECK(bulk_prefactor(EnsembleKind::wigner_symmetric, 1.0) == doctest::Approx(std::sqrt(3.0) / 2.0));

  for (auto kind : {EnsembleKind::gue, EnsembleKind::goe, EnsembleKind::gse}) {
    const double t = classical_location(30, 100);
    CHECK(bulk_eigenvalue_statistic(t, 30, 100, kind, MdpScaling(1.0)) == 0.0);
  }
  // t(1/2) = 0, so X' = sqrt(2) * 0.01 * 100 / (2 sqrt(log 100)).
  CHECK(bulk_eigenvalue_statistic(0.01, 50, 100, EnsembleKind::gue, MdpScaling(2.0)) ==
        doctest::Approx(std::sqrt(2.0) / (2.0 * std::sqrt(std::log(100.0)))).epsilon(1e-14));
  CHECK_THROWS_AS(bulk_eigenvalue_statistic(0.0, 2, 100, EnsembleKind::gue, MdpScaling(1.0)),
                  std::out_of_range);
  CHECK_NOTHROW(bulk_eigenvalue_statistic(0.0, 2, 100, EnsembleKind::gue, MdpScaling(1.0), BulkGuard{0.01, 0.99}));
  CHECK_THROWS(bulk_eigenvalue_statistic(0.0, 50, 100, EnsembleKind::lue, MdpScaling(1.0)));
}

TEST_CASE("covariance eigenvalue statistic") {
  const MarchenkoPasturLaw law(128, 128);
  const double median = 0.6527759416335704;
  const double density = std::sqrt(median * (4.0 - median)) / (2.0 * kPi * median);
  const double lambda = median + 0.02;
  const double expected = std::sqrt(2.0) * kPi * density * 0.02 * 128.0 / std::sqrt(std::log(128.0));
  CHECK(covariance_eigenvalue_statistic(lambda, 64, law, MdpScaling(1.0)) ==
        doctest::Approx(expected).epsilon(1e-8));
  CHECK(std::abs(covariance_eigenvalue_statistic(law.quantile(0.25), 32, law, MdpScaling(1.0))) < 1e-12);
  for (std::size_t i = 7; i <= 121; ++i) {
    CHECK(covariance_eigenvalue_statistic(law.quantile(static_cast<double>(i) / 128.0) + 1e-3, i, law,
                                          MdpScaling(1.0)) > 0.0);
  }
  CHECK_THROWS_AS(covariance_eigenvalue_statistic(1.0, 128, law, MdpScaling(1.0)), std::out_of_range);
}

TEST_CASE("exact rate curves") {
  const auto law = counting_law_gue(64, Interval::at_least(0.0));
  const auto curve = rate_curve_exact(law, MdpScaling(1.0), kGrid);
  CHECK(curve.method == RateMethod::exact_pmf);
  for (std::size_t j = 0; j < kGrid.size(); ++j) {
    CHECK(curve.target_rate[j] == kGrid[j] * kGrid[j] / 2.0);
    CHECK(curve.empirical_rate[j] <= 0.0);
    // The eta profile of [0, inf) is symmetric under eta -> 1 - eta.
    CHECK(std::abs(curve.empirical_rate[j] - curve.empirical_rate[kGrid.size() - 1 - j]) <= 1e-10);
  }
  CHECK(curve.empirical_rate[3] >= curve.empirical_rate[4]);
  CHECK(curve.empirical_rate[4] >= curve.empirical_rate[5]);
  CHECK(curve.empirical_rate[2] >= curve.empirical_rate[1]);
  CHECK(curve.empirical_rate[1] >= curve.empirical_rate[0]);
  CHECK_THROWS(rate_curve_exact(law, MdpScaling(1.0), std::vector<double>{0.0}));
}

TEST_CASE("binomial family moves toward the Gaussian rate") {
  double previous_rate_gap = INFINITY;
  double previous_cgf_gap = INFINITY;
  const std::vector<double> grid{1.0};
  for (double k : {1e4, 1e5, 1e6}) {
    const IdenticalBernoulli profile{static_cast<std::uint64_t>(k), 0.5};
    const double a = std::pow(k, 0.1);
    const auto curve = rate_curve_exact(profile, MdpScaling(a), grid);
    const double rate_gap = std::abs(curve.empirical_rate[0] + 0.5);
    const double cgf_gap = std::abs(exact_cgf(profile, 1.0, a) - 0.5);
    CHECK(rate_gap < previous_rate_gap);
    CHECK(cgf_gap < previous_cgf_gap);
    previous_rate_gap = rate_gap;
    previous_cgf_gap = cgf_gap;
  }
  CHECK(previous_cgf_gap <= 0.08);
}

TEST_CASE("Monte Carlo rate curve flags empty tails") {
  const std::vector<double> same(2000, 0.25);
  const auto curve = rate_curve_mc(same, MdpScaling(1.0), kGrid);
  for (std::size_t j = 0; j < kGrid.size(); ++j) {
    CHECK(curve.flagged[j]);
    CHECK(std::isnan(curve.empirical_rate[j]));
  }
  CHECK_THROWS(rate_curve_mc(std::vector<double>{}, MdpScaling(1.0), kGrid));
}

TEST_CASE("Monte Carlo rate of normal samples brackets the normal tail") {
  std::mt19937_64 gen(1234);
  std::normal_distribution<double> normal;
  std::vector<double> samples(1000000);
  for (auto& x : samples) x = normal(gen);
  const auto curve = rate_curve_mc(samples, MdpScaling(1.0), std::vector<double>{1.0, -1.0});
  // log of P(N(0,1) >= 1) = -1.841021645009263506...
  const double target = -1.8410216450092635;
  CHECK(std::abs(std::log(normal_survival(1.0)) - target) < 1e-13);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK_FALSE(curve.flagged[j]);
    CHECK(curve.ci_low[j] <= target);
    CHECK(target <= curve.ci_high[j]);
    CHECK(curve.empirical_rate[j] <= 0.0);
  }
}

TEST_CASE("Monte Carlo GUE counting rates agree with the kernel law") {
  const std::size_t n = 64;
  const Interval interval = Interval::at_least(0.0);
  const auto law = counting_law_gue(n, interval);
  const auto counts = sample_counts(EnsembleSpec::gue(n, 808), interval, 20000, 1);
  std::vector<double> standardized;
  for (auto c : counts) {
    standardized.push_back(standardized_counting(static_cast<double>(c), law.mean(), law.variance(), MdpScaling(1.0)));
  }
  const std::vector<double> grid{-2.0, -1.0, 1.0, 2.0};
  const auto mc = rate_curve_mc(standardized, MdpScaling(1.0), grid);
  const auto exact = rate_curve_exact(law, MdpScaling(1.0), grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    REQUIRE_FALSE(mc.flagged[j]);
    CHECK(mc.ci_low[j] <= exact.empirical_rate[j]);
    CHECK(exact.empirical_rate[j] <= mc.ci_high[j]);
  }
}

TEST_CASE("duality events coincide on sampled spectra") {
  const std::size_t n = 40;
  const double y = 0.3;
  const std::size_t i = 25;
  std::size_t count_events = 0, eigen_events = 0;
  for (std::uint64_t r = 0; r < 3000; ++r) {
    auto rng = RngStream::substream(9, r);
    const auto s = sample_normalized_spectrum(EnsembleSpec::gue(n), rng);
    const bool by_count = counting(s, Interval::at_least(y)) <= n - i;
    const bool by_eigen = s.eigenvalue(i) <= y;
    CHECK(by_count == by_eigen);
    count_events += by_count;
    eigen_events += by_eigen;
  }
  CHECK(count_events == eigen_events);
}

TEST_CASE("exact GUE variance scan") {
  VarianceScanConfig config;
  config.ensemble = EnsembleSpec::gue(1);
  config.sizes = {64, 128, 256, 512};
  const auto scan = variance_scan(config);
  REQUIRE(scan.rows.size() == 4);
  for (const auto& row : scan.rows) CHECK(row.mean == doctest::Approx(row.n / 2.0).epsilon(1e-10));
  for (std::size_t k = 1; k < 4; ++k) CHECK(scan.rows[k].variance > scan.rows[k - 1].variance);
  const double target = 1.0 / (2.0 * kPi * kPi);
  CHECK(std::abs(scan.slope - target) <= 0.25 * target);
  CHECK(scan.slope_standard_error == 0.0);

  config.ensemble = EnsembleSpec::goe(1);
  CHECK_THROWS_AS(variance_scan(config), std::invalid_argument);
}

TEST_CASE("Monte Carlo variance scan is independent of the thread count") {
  VarianceScanConfig config;
  config.ensemble = EnsembleSpec::goe(1, 77);
  config.sizes = {16, 32};
  config.method = ScanMethod::monte_carlo;
  config.replicas = 400;
  config.threads = 1;
  const auto one = variance_scan(config);
  config.threads = 8;
  const auto eight = variance_scan(config);
  for (std::size_t k = 0; k < one.rows.size(); ++k) {
    CHECK(one.rows[k].mean == eight.rows[k].mean);
    CHECK(one.rows[k].variance == eight.rows[k].variance);
  }
  CHECK(one.slope == eight.slope);
  CHECK(one.slope_standard_error > 0.0);
}

TEST_CASE("moment match reports") {
  const auto matched = moment_match_report(make_matched_atom(0.5), Rational(1, 2));
  CHECK(matched.pass);
  CHECK(matched.atom[3] == Rational(3, 4));
  CHECK(matched.gaussian[3] == Rational(3, 4));

  const auto rademacher = moment_match_report(AtomDistribution::rademacher(1.0), Rational(1));
  CHECK_FALSE(rademacher.pass);
  CHECK(rademacher.matches[0]);
  CHECK(rademacher.matches[1]);
  CHECK(rademacher.matches[2]);
  CHECK_FALSE(rademacher.matches[3]);
  CHECK(rademacher.atom[3] == 1);
  CHECK(rademacher.gaussian[3] == 3);

  CHECK(moment_match_report(AtomDistribution::gaussian(2.0), Rational(2)).pass);
  const auto custom = AtomDistribution::custom_discrete({-1.0, 1.0}, {0.5, 0.5});
  CHECK_THROWS_AS(moment_match_report(custom, Rational(1)), std::invalid_argument);
}
