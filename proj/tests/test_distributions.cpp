#include "bid/distributions.hpp"
#include "bid/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

using namespace bid;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> draw_gtn(const GtnParams& p, std::size_t n, std::uint64_t seed) {
  RandomSource rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = sample_gtn(p, rng);
  return out;
}

} // namespace

TEST_CASE("normal_cdf values") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(0).scale(1).epsilon(1e-6));
  CHECK(std::abs(normal_cdf(1.959964) - oracle::phi_by_quadrature(1.959964)) <= 1e-12);
  const double tail = normal_cdf(-8.0);
  CHECK(tail > 0.0);
  CHECK(tail < 1e-14);
  CHECK(tail >= oracle::upper_tail_lower_bound(8.0));
  CHECK(tail <= oracle::upper_tail_upper_bound(8.0));
}

TEST_CASE("normal_cdf agrees with quadrature to 1e-12") {
  for (double x = -6.0; x <= 6.0; x += 0.37)
    CHECK(std::abs(normal_cdf(x) - oracle::phi_by_quadrature(x)) <= 1e-12);
}

TEST_CASE("normal_cdf symmetry and monotonicity") {
  double prev = 0.0;
  for (double x = -30.0; x <= 30.0; x += 0.01) {
    CHECK(std::abs(normal_cdf(x) + normal_cdf(-x) - 1.0) <= 1e-14);
    const double c = normal_cdf(x);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("normal_quantile inverts normal_cdf") {
  for (double p : {1e-300, 1e-20, 1e-8, 0.01, 0.02425, 0.3, 0.5, 0.7, 0.975, 1 - 1e-10}) {
    const double x = normal_quantile(p);
    CHECK(normal_cdf(x) == doctest::Approx(p).epsilon(1e-10));
  }
  CHECK(normal_quantile(0.0) == -inf);
  CHECK(normal_quantile(1.0) == inf);
}

TEST_CASE("gtn_log_pdf examples") {
  const GtnParams p{0.0, 1.0, -1.0, 1.0};
  CHECK(gtn_log_pdf(2.0, p) == -inf);
  const double expected = std::log(oracle::std_normal_density(0.0) /
                                   (oracle::phi_by_quadrature(1.0) - oracle::phi_by_quadrature(-1.0)));
  CHECK(gtn_log_pdf(0.0, p) == doctest::Approx(expected).epsilon(1e-12));

  // One-sided truncation at zero: density 2 * phi(x).
  const GtnParams tn{0.0, 1.0, 0.0, inf};
  CHECK(gtn_log_pdf(0.5, tn) == doctest::Approx(std::log(2.0 * oracle::std_normal_density(0.5))).epsilon(1e-12));
  CHECK(gtn_log_pdf(-0.5, tn) == -inf);
}

TEST_CASE("gtn_log_pdf normalizer underflow is an error") {
  const GtnParams deep{0.0, 1.0, 40.0, 41.0};
  CHECK_THROWS_AS(gtn_log_pdf(40.5, deep), NumericalError);
  CHECK_THROWS_AS(gtn_log_pdf(0.0, GtnParams{0.0, -1.0, -1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(gtn_log_pdf(0.0, GtnParams{0.0, 1.0, 1.0, 1.0}), ConfigError);
}

TEST_CASE("gtn density integrates to one") {
  RandomSource rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const double mu = -8.0 + 16.0 * rng.uniform();
    const double tau = std::exp(-3.0 + 9.0 * rng.uniform());
    const double a = -2.0 + 2.0 * rng.uniform();
    const double b = trial % 7 == 0 ? inf : a + 0.01 + 3.0 * rng.uniform();
    const GtnParams p{mu, tau, a, b};
    const oracle::TruncatedNormal t{mu, tau, a, b};
    const double s = std::sqrt(tau);
    const double depth = std::max((a - mu) * s, (mu - b) * s);
    if (depth > 37.0) {
      // Normalizer at or below the smallest subnormal double.
      if (depth > 39.0) CHECK_THROWS_AS(gtn_log_pdf(std::clamp(mu, a, b), p), NumericalError);
      continue;
    }
    const double integral = oracle::integrate_panels(
        [&](double x) { return std::exp(gtn_log_pdf(x, p)); }, t.support_lo(), t.support_hi(), 64);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("sample_gtn support and tail regime") {
  RandomSource rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = sample_gtn({0.0, 1.0, -1.0, 1.0}, rng);
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  // Both standardized bounds beyond 6 on the same side.
  for (const GtnParams& p : {GtnParams{10.0, 1.0, -1.0, 1.0}, GtnParams{-10.0, 1.0, -1.0, 1.0},
                             GtnParams{0.0, 1e6, 0.5, 0.50001}, GtnParams{100.0, 1.0, 0.0, 1e-3}}) {
    const auto draws = draw_gtn(p, 10000, 17);
    const oracle::TruncatedNormal t{p.mu, p.tau, p.a, p.b};
    for (double v : draws) {
      REQUIRE(v >= p.a);
      REQUIRE(v <= p.b);
    }
    CHECK(std::abs(sample_mean(draws) - t.mean()) <= 0.01 * (p.b - p.a));
  }
}

TEST_CASE("sample_gtn far-tail mean matches the moment integral") {
  const GtnParams p{10.0, 1.0, -1.0, 1.0};
  const oracle::TruncatedNormal t{10.0, 1.0, -1.0, 1.0};
  const auto draws = draw_gtn(p, 10000, 5);
  CHECK(std::abs(sample_mean(draws) - t.mean()) <= 0.01);
  CHECK(gtn_mean(p) == doctest::Approx(t.mean()).epsilon(1e-9));
}

TEST_CASE("sample_gtn one-sided KS against the analytic CDF") {
  // N(0, 1/4) truncated to [0, inf): CDF = erf(sqrt(2) x).
  const auto draws = draw_gtn({0.0, 4.0, 0.0, inf}, 10000, 9);
  const double d = oracle::ks_statistic(draws, [](double x) { return std::erf(std::sqrt(2.0) * x); });
  CHECK(d < oracle::ks_critical_1pct(draws.size()));
}

TEST_CASE("gtn_cdf agrees with the oracle") {
  const GtnParams p{0.3, 2.5, -1.0, 1.0};
  const oracle::TruncatedNormal t{0.3, 2.5, -1.0, 1.0};
  std::vector<double> xs;
  for (double x = -0.95; x < 1.0; x += 0.1) xs.push_back(x);
  const auto ref = oracle::cdf_at_sorted(t, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(gtn_cdf(xs[i], p) == doctest::Approx(ref[i]).epsilon(1e-9));
}

TEST_CASE("sample_gtn never leaves its interval on fuzzed parameters") {
  RandomSource params(101);
  RandomSource rng(202);
  std::size_t violations = 0;
  for (int i = 0; i < 1000000; ++i) {
    const double mu = -50.0 + 100.0 * params.uniform();
    const double tau = std::exp(-10.0 + 30.0 * params.uniform());
    const double a = -3.0 + 6.0 * params.uniform();
    const double b = a + std::exp(-12.0 + 14.0 * params.uniform());
    const double v = sample_gtn({mu, tau, a, b}, rng);
    violations += !(v >= a && v <= b);
  }
  CHECK(violations == 0);
}

TEST_CASE("sample_gtn KS passes on fuzzed parameter sets") {
  RandomSource params(77);
  int passed = 0;
  const int sets = 100;
  for (int s = 0; s < sets; ++s) {
    const double mu = -6.0 + 12.0 * params.uniform();
    const double tau = std::exp(-2.0 + 8.0 * params.uniform());
    const double a = -1.5 + 1.5 * params.uniform();
    const double b = a + 0.05 + 2.0 * params.uniform();
    auto draws = draw_gtn({mu, tau, a, b}, 10000, 1000 + s);
    std::sort(draws.begin(), draws.end());
    const auto cdf = oracle::cdf_at_sorted({mu, tau, a, b}, draws);
    passed += oracle::ks_statistic(cdf) < oracle::ks_critical_1pct(draws.size());
  }
  CHECK(passed >= 99);
}

TEST_CASE("sample_gamma moments and support") {
  RandomSource rng(4);
  std::vector<double> d(100000);
  for (auto& v : d) v = sample_gamma({1.0, 1.0}, rng);
  CHECK(std::abs(sample_mean(d) - 1.0) <= 0.02);
  for (auto& v : d) v = sample_gamma({2.1, 1.0}, rng);
  CHECK(std::abs(sample_mean(d) - 2.1) <= 0.03);
  for (auto& v : d) {
    v = sample_gamma({0.5, 2.0}, rng);
    REQUIRE(v > 0.0);
  }
  CHECK(std::abs(sample_mean(d) - 0.25) <= 0.01);
  CHECK_THROWS_AS(sample_gamma({0.0, 1.0}, rng), ConfigError);
  CHECK_THROWS_AS(sample_gamma({1.0, -2.0}, rng), ConfigError);
}

TEST_CASE("sample_inverse_gamma moments and equivalence with 1/Gamma") {
  RandomSource rng(8);
  std::vector<double> ig(100000);
  for (auto& v : ig) v = sample_inverse_gamma({3.0, 2.0}, rng);
  CHECK(std::abs(sample_mean(ig) - 1.0) <= 0.02);

  RandomSource a(21), b(22);
  std::vector<double> x(20000), y(20000);
  for (auto& v : x) v = sample_inverse_gamma({2.5, 1.5}, a);
  for (auto& v : y) v = 1.0 / sample_gamma({2.5, 1.5}, b);
  // Two-sample 1% critical value: 1.628 * sqrt(2/n).
  CHECK(oracle::ks_two_sample(x, y) < 1.628 * std::sqrt(2.0 / 20000.0));

  for (int i = 0; i < 100000; ++i) {
    const double v = sample_inverse_gamma({0.1, 1.0}, rng);
    REQUIRE(v > 0.0);
    REQUIRE(std::isfinite(v));
  }
}

TEST_CASE("gamma and inverse-gamma densities integrate to one") {
  const GammaParams g{2.1, 1.3};
  CHECK(oracle::integrate_panels([&](double x) { return std::exp(gamma_log_pdf(x, g)); }, 1e-12, 60.0, 64) ==
        doctest::Approx(1.0).epsilon(1e-8));
  const GammaParams ig{3.0, 2.0};
  CHECK(oracle::integrate_panels([&](double x) { return std::exp(inverse_gamma_log_pdf(x, ig)); }, 1e-6, 400.0,
                                 4000) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("random source is reproducible") {
  RandomSource a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RandomSource c(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = c.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(c.index(7) < 7u);
  }
  CHECK(RandomSource::mix_seed(1, 0) != RandomSource::mix_seed(1, 1));
}
