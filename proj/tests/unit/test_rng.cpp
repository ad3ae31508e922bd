#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "error.hpp"
#include "helpers.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "stat_tests.hpp"

using namespace bkmcmc;
using testutil::draws;
using testutil::mean;
using testutil::se_mean;

TEST_SUITE("rng") {

TEST_CASE("same seed and stream reproduce the sequence bit for bit") {
  RngHandle a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(a.next_u64() == b.next_u64());
    REQUIRE(sample_gamma(0.3, 2.0, a) == sample_gamma(0.3, 2.0, b));
  }
}

TEST_CASE("distinct streams give different, uncorrelated sequences") {
  RngHandle a(42, 0), b(42, 1);
  const std::size_t n = 100000;
  std::vector<double> x(n), y(n);
  int equal = 0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = a.uniform01();
    y[i] = b.uniform01();
    equal += x[i] == y[i];
  }
  CHECK(equal == 0);
  double cov = 0.0;
  for (std::size_t i = 0; i < n; ++i) cov += (x[i] - 0.5) * (y[i] - 0.5);
  const double corr = cov / static_cast<double>(n) * 12.0;
  CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("uniform01 stays in the open interval") {
  RngHandle rng(1);
  for (int i = 0; i < 1000000; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("gamma mean with shape 2, scale 3") {
  RngHandle rng(11);
  const auto x = draws(1000000, rng, [](RngHandle& r) { return sample_gamma(2.0, 3.0, r); });
  const double se = std::sqrt(2.0 * 9.0 / 1e6);
  CHECK(std::abs(mean(x) - 6.0) < 3.0 * se);
}

TEST_CASE("gamma with shape 1 is exponential") {
  RngHandle rng(12);
  const auto x = draws(100000, rng, [](RngHandle& r) { return sample_gamma(1.0, 2.0, r); });
  const auto ks = ks_test(x, [](double t) { return t <= 0 ? 0.0 : 1.0 - std::exp(-t / 2.0); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("gamma shape 1/2 against a CDF built by quadrature of the density") {
  RngHandle rng(13);
  auto x = draws(100000, rng, [](RngHandle& r) { return sample_gamma(0.5, 1.0, r); });
  std::sort(x.begin(), x.end());
  // With t = s^2 the density t^(-1/2) e^(-t) / Gamma(1/2) becomes 2 e^(-s^2) / sqrt(pi).
  const auto f = [](double s) { return 2.0 * std::exp(-s * s) / std::sqrt(std::numbers::pi); };
  std::vector<double> cdf(x.size());
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = std::sqrt(x[i]);
    acc += integrate_adaptive(f, prev, s, 1e-12, 1e-15);
    prev = s;
    cdf[i] = acc;
  }
  double d = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max({d, std::abs(cdf[i] - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - cdf[i])});
  }
  CHECK(kolmogorov_tail(d * std::sqrt(n)) > 0.01);
}

TEST_CASE("gamma with tiny shape never returns zero or NaN") {
  RngHandle rng(14);
  for (int i = 0; i < 200000; ++i) {
    const double g = sample_gamma(0.05, 1.0, rng);
    REQUIRE(g > 0.0);
    REQUIRE(std::isfinite(g));
  }
}

TEST_CASE("beta means") {
  RngHandle rng(15);
  const auto x = draws(1000000, rng, [](RngHandle& r) { return sample_beta(0.7, 0.7, r); });
  CHECK(std::abs(mean(x) - 0.5) < 3.0 * se_mean(x));

  // Mean of Beta(2,3) from quadrature of t * 12 t (1-t)^2.
  const double oracle = integrate_adaptive([](double t) { return t * 12.0 * t * (1 - t) * (1 - t); }, 0.0, 1.0);
  const auto y = draws(1000000, rng, [](RngHandle& r) { return sample_beta(2.0, 3.0, r); });
  CHECK(std::abs(mean(y) - oracle) < 3.0 * se_mean(y));
}

TEST_CASE("beta stays strictly inside (0,1), even for small shapes") {
  RngHandle rng(16);
  for (int i = 0; i < 1000000; ++i) {
    const double b = sample_beta(0.05, 0.05, rng);
    REQUIRE(b > 0.0);
    REQUIRE(b < 1.0);
  }
}

TEST_CASE("bernoulli, poisson and normal frequencies") {
  RngHandle rng(17);
  const std::size_t n = 1000000;
  std::size_t ones = 0, zeros = 0;
  double s2 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ones += static_cast<std::size_t>(sample_standard(BernoulliLaw(0.3), rng));
    zeros += sample_standard(PoissonLaw(2.0), rng) == 0.0;
    const double z = sample_standard(NormalLaw(0.0, 1.0), rng);
    s1 += z;
    s2 += z * z;
  }
  CHECK(std::abs(static_cast<double>(ones) / n - 0.3) < 3.0 * testutil::se_prop(0.3, n));
  const double p0 = std::exp(-2.0);
  CHECK(std::abs(static_cast<double>(zeros) / n - p0) < 3.0 * testutil::se_prop(p0, n));
  const double var = s2 / n - (s1 / n) * (s1 / n);
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("moments of every law within 4 standard errors") {
  struct Case {
    ScalarLaw law;
    double mean, var, fourth_central;
  };
  // fourth central moments give the standard error of the variance
  const std::vector<Case> cases = {
      {GammaLaw(2.0, 0.5), 1.0, 0.5, (3 * 4.0 + 6 * 2.0) * std::pow(0.5, 4)},
      {ExpLaw(2.0), 2.0, 4.0, 9.0 * 16.0},
      {BetaLaw(2.0, 3.0), 0.4, 0.04, 0.0037714285714285714},
      {BernoulliLaw(0.3), 0.3, 0.21, 0.3 * 0.7 * (1 - 3 * 0.3 * 0.7)},
      {PoissonLaw(3.5), 3.5, 3.5, 3.5 * (1 + 3 * 3.5)},
      {PoissonLaw(80.0), 80.0, 80.0, 80.0 * (1 + 3 * 80.0)},
      {Uniform01Law{}, 0.5, 1.0 / 12.0, 1.0 / 80.0},
      {NormalLaw(-1.0, 4.0), -1.0, 4.0, 3.0 * 16.0},
      {LaplaceLaw(1.5), 0.0, 2.0 * 2.25, 24.0 * std::pow(1.5, 4)},
  };
  RngHandle rng(18);
  const std::size_t n = 1000000;
  for (const auto& c : cases) {
    const auto x = draws(n, rng, [&](RngHandle& r) { return sample_standard(c.law, r); });
    const double m = mean(x);
    const double v = testutil::variance(x);
    CHECK(std::abs(m - c.mean) < 4.0 * std::sqrt(c.var / n));
    CHECK(std::abs(v - c.var) < 4.0 * std::sqrt((c.fourth_central - c.var * c.var) / n));
  }
}

TEST_CASE("parameter domain errors") {
  RngHandle rng(19);
  CHECK_THROWS_AS(sample_gamma(0.0, 1.0, rng), DomainError);
  CHECK_THROWS_AS(sample_gamma(1.0, -1.0, rng), DomainError);
  CHECK_THROWS_AS(sample_beta(1.0, 0.0, rng), DomainError);
  CHECK_THROWS_AS(sample_exponential(0.0, rng), DomainError);
  CHECK_THROWS_AS(BernoulliLaw(1.5), DomainError);
  CHECK_THROWS_AS(PoissonLaw(-1.0), DomainError);
  CHECK_THROWS_AS(NormalLaw(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(LaplaceLaw(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

}  // TEST_SUITE
