#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "eigmdp/laws.hpp"
#include "oracles.hpp"

using namespace eigmdp;

namespace {
constexpr double kPi = std::numbers::pi;
const auto semicircle_by_definition = [](double x) {
  return std::abs(x) >= 2.0 ? 0.0 : std::sqrt(4.0 - x * x) / (2.0 * kPi);
};
}  // namespace

TEST_CASE("semicircle density values") {
  CHECK(semicircle_density(0.0) == doctest::Approx(1.0 / kPi).epsilon(1e-15));
  CHECK(semicircle_density(2.0) == 0.0);
  CHECK(semicircle_density(-2.0) == 0.0);
  CHECK(semicircle_density(3.5) == 0.0);
  CHECK(semicircle_density(1.0) == doctest::Approx(std::sqrt(3.0) / (2.0 * kPi)).epsilon(1e-15));
  CHECK_THROWS_AS(semicircle_density(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(semicircle_density(INFINITY), std::domain_error);
}

TEST_CASE("semicircle density is symmetric and has unit mass") {
  for (double x : {0.1, 0.7, 1.3, 1.99}) CHECK(semicircle_density(x) == semicircle_density(-x));
  CHECK(std::abs(oracle::integrate([](double x) { return semicircle_density(x); }, -2.0, 2.0) - 1.0) <
        1e-10);
}

TEST_CASE("semicircle cdf against quadrature oracle") {
  CHECK(semicircle_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(semicircle_cdf(2.0) == 1.0);
  CHECK(semicircle_cdf(-2.0) == 0.0);
  CHECK(semicircle_cdf(5.0) == 1.0);
  // Tanh-sinh quadrature of the density definition: 0.80449889052211468...
  const double oracle_at_one = oracle::integrate(semicircle_by_definition, -2.0, 1.0);
  CHECK(std::abs(oracle_at_one - 0.8044988905221147) < 1e-13);
  CHECK(std::abs(semicircle_cdf(1.0) - oracle_at_one) < 1e-13);
  for (double t : {-1.9, -1.2, -0.4, 0.3, 1.7}) {
    CHECK(std::abs(semicircle_cdf(t) - oracle::integrate(semicircle_by_definition, -2.0, t)) < 1e-12);
  }
}

TEST_CASE("semicircle cdf derivative matches the density") {
  const double h = 1e-5;
  for (double t = -1.9; t <= 1.9; t += 0.1) {
    const double derivative = (semicircle_cdf(t + h) - semicircle_cdf(t - h)) / (2.0 * h);
    CHECK(std::abs(derivative - semicircle_density(t)) <= 1e-6 * semicircle_density(t));
  }
}

TEST_CASE("semicircle quantile") {
  CHECK(semicircle_quantile(0.5) == 0.0);
  const double target = 0.8044989;
  const double oracle_root = oracle::bisect(
      [](double t) { return oracle::integrate(semicircle_by_definition, -2.0, t); }, target, -2.0, 2.0);
  CHECK(std::abs(oracle_root - 1.0) < 1e-6);
  CHECK(std::abs(semicircle_quantile(target) - oracle_root) < 1e-10);
  CHECK(semicircle_quantile(0.25) == doctest::Approx(-semicircle_quantile(0.75)).epsilon(1e-14));
  CHECK_THROWS_AS(semicircle_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(semicircle_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(semicircle_quantile(-0.2), std::domain_error);
}

TEST_CASE("semicircle quantile and cdf round trips on random probes") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> probability(1e-9, 1.0 - 1e-9);
  std::uniform_real_distribution<double> location(-2.0 + 1e-6, 2.0 - 1e-6);
  for (int k = 0; k < 100; ++k) {
    const double x = probability(gen);
    CHECK(std::abs(semicircle_cdf(semicircle_quantile(x)) - x) <= 1e-12);
    const double t = location(gen);
    CHECK(std::abs(semicircle_quantile(semicircle_cdf(t)) - t) <= 1e-10);
  }
}

TEST_CASE("classical locations") {
  CHECK(classical_location(50, 100) == 0.0);
  CHECK(classical_location(100, 100) == 2.0);
  CHECK(classical_location(1, 1) == 2.0);
  // i/n = 0.8044989 for i = 8044989, n = 10^7.
  CHECK(std::abs(classical_location(8044989, 10000000) - 1.0) < 1e-6);
  CHECK(classical_location(1, 4) == doctest::Approx(semicircle_quantile(0.25)));
  CHECK_THROWS_AS(classical_location(0, 10), std::out_of_range);
  CHECK_THROWS_AS(classical_location(11, 10), std::out_of_range);
}

TEST_CASE("Marchenko-Pastur edges") {
  const MarchenkoPasturLaw square(50, 50);
  CHECK(square.lower_edge() == 0.0);
  CHECK(square.upper_edge() == 4.0);
  const MarchenkoPasturLaw tall(200, 100);
  CHECK(tall.ratio() == 2.0);
  CHECK(tall.lower_edge() == doctest::Approx(std::pow(std::sqrt(2.0) - 1.0, 2)).epsilon(1e-15));
  CHECK(tall.upper_edge() == doctest::Approx(std::pow(std::sqrt(2.0) + 1.0, 2)).epsilon(1e-15));
  CHECK(tall.lower_edge() < tall.upper_edge());
  // Exact agreement with the limiting edges when p/n equals gamma.
  const double gamma = 4.0;
  const MarchenkoPasturLaw four(400, 100);
  CHECK(std::abs(four.lower_edge() - std::pow(std::sqrt(gamma) - 1.0, 2)) == 0.0);
  CHECK_THROWS_AS(MarchenkoPasturLaw(10, 20), std::invalid_argument);
  CHECK_THROWS_AS(MarchenkoPasturLaw(0, 0), std::invalid_argument);
}

TEST_CASE("Marchenko-Pastur density values") {
  const MarchenkoPasturLaw square(64, 64);
  CHECK(square.density(4.0) == 0.0);
  CHECK(square.density(0.0) == 0.0);
  CHECK(square.density(-1.0) == 0.0);
  CHECK(square.density(2.0) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
  const MarchenkoPasturLaw tall(128, 64);
  CHECK(tall.density(tall.lower_edge()) == 0.0);
  CHECK(tall.density(tall.upper_edge()) == 0.0);
}

TEST_CASE("Marchenko-Pastur density integrates to one") {
  for (auto [p, n] : {std::pair{100, 100}, {150, 100}, {200, 100}, {400, 100}}) {
    const MarchenkoPasturLaw law(p, n);
    const double mass = oracle::integrate([&](double x) { return law.density(x); },
                                          law.lower_edge(), law.upper_edge());
    CHECK(std::abs(mass - 1.0) <= 1e-8);
  }
}

TEST_CASE("Marchenko-Pastur cdf and quantile") {
  const MarchenkoPasturLaw square(64, 64);
  CHECK(square.cdf(square.upper_edge()) == 1.0);
  CHECK(square.cdf(square.lower_edge()) == 0.0);
  for (double t : {0.01, 0.3, 1.0, 2.5, 3.9}) {
    const double reference = oracle::integrate([&](double x) { return square.density(x); }, 0.0, t);
    CHECK(std::abs(square.cdf(t) - reference) < 1e-10);
  }
  // Median for p = n: 0.652775941633570369... (30-digit quadrature + root find).
  CHECK(std::abs(square.quantile(0.5) - 0.6527759416335704) < 1e-9);
  const MarchenkoPasturLaw tall(200, 100);
  CHECK(std::abs(tall.quantile(0.5) - 1.6609317631627271) < 1e-9);
  CHECK_THROWS_AS(square.quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(square.quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(square.cdf(std::nan("")), std::domain_error);
}

TEST_CASE("Marchenko-Pastur round trips on random probes") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> probability(1e-6, 1.0 - 1e-6);
  for (auto [p, n] : {std::pair{100, 100}, {150, 100}, {400, 100}}) {
    const MarchenkoPasturLaw law(p, n);
    std::uniform_real_distribution<double> location(law.lower_edge() + 1e-3, law.upper_edge() - 1e-3);
    for (int k = 0; k < 100; ++k) {
      const double x = probability(gen);
      CHECK(std::abs(law.cdf(law.quantile(x)) - x) <= 1e-8);
      const double t = location(gen);
      CHECK(std::abs(law.quantile(law.cdf(t)) - t) <= 1e-8);
    }
  }
}
