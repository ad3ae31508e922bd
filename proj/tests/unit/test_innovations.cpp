#include <doctest.h>

#include <cmath>
#include <complex>

#include "bessel_k.hpp"
#include "error.hpp"
#include "helpers.hpp"
#include "innovations.hpp"
#include "stat_tests.hpp"

using namespace bkmcmc;
using testutil::draws;
using testutil::mean;
using testutil::se_mean;
using cd = std::complex<double>;

namespace {

// Closed forms written out independently of innovation_char_fn.
cd gamma_innovation_cf(double p, double sigma, double beta, double s) {
  return std::pow(beta + (1.0 - beta) / (cd(1.0, 0.0) - cd(0.0, s * sigma)), p);
}
double bk_innovation_cf(double p, double sigma, double beta, double s) {
  return std::pow(beta * beta + (1.0 - beta * beta) / (1.0 + s * sigma * s * sigma), p);
}

}  // namespace

TEST_SUITE("innovations") {

TEST_CASE("gamma innovation is almost surely zero as beta approaches one") {
  RngHandle rng(1);
  int nonzero = 0;
  for (int i = 0; i < 100000; ++i) nonzero += sample_gamma_innovation(1.0, 1.0, 1.0 - 1e-9, rng) != 0.0;
  CHECK(nonzero == 0);
}

TEST_CASE("gamma innovation characteristic function") {
  RngHandle rng(2);
  const auto x = draws(1000000, rng, [](RngHandle& r) { return sample_gamma_innovation(2.0, 1.0, 0.5, r); });
  const auto grid = cf_grid();
  CHECK(grid.size() == 21);
  const double err = cf_sup_error(x, grid, [](double s) { return gamma_innovation_cf(2.0, 1.0, 0.5, s); });
  CHECK(err < 0.01);
  CHECK(err < 4.0 / std::sqrt(1e6));
  for (double s : grid) {
    const cd lib = innovation_char_fn(GammaInnovation(2.0, 1.0, 0.5), s);
    CHECK(std::abs(lib - gamma_innovation_cf(2.0, 1.0, 0.5, s)) < 1e-14);
  }
}

TEST_CASE("gamma self-decomposition: beta X + innovation is Gamm(p, sigma)") {
  RngHandle rng(3);
  for (double p : {0.5, 2.0}) {
    for (double beta : {0.3, 0.97}) {
      const auto x = draws(100000, rng, [&](RngHandle& r) {
        return beta * sample_gamma(p, 1.5, r) + sample_gamma_innovation(p, 1.5, beta, r);
      });
      CHECK(ks_test(x, [p](double t) { return gamma_cdf(t, p, 1.5); }).p_value > 0.01);
    }
  }
}

TEST_CASE("gamma innovation is nonnegative") {
  RngHandle rng(4);
  for (int i = 0; i < 100000; ++i) REQUIRE(sample_gamma_innovation(0.5, 1.0, 0.3, rng) >= 0.0);
}

TEST_CASE("exponential innovation: atom at zero and mean") {
  RngHandle rng(5);
  const double beta = 0.35, sigma = 2.0;
  const std::size_t n = 1000000;
  const auto x = draws(n, rng, [&](RngHandle& r) { return sample_exp_innovation(sigma, beta, r); });
  std::size_t zeros = 0;
  for (double v : x) zeros += v == 0.0;
  CHECK(std::abs(static_cast<double>(zeros) / n - beta) < 3.0 * testutil::se_prop(beta, n));
  // mixture mean: beta * 0 + (1 - beta) * sigma
  CHECK(std::abs(mean(x) - (1.0 - beta) * sigma) < 3.0 * se_mean(x));
}

TEST_CASE("exponential self-decomposition") {
  RngHandle rng(6);
  for (double beta : {0.3, 0.7, 0.97}) {
    const auto x = draws(100000, rng, [&](RngHandle& r) {
      return beta * sample_exponential(1.0, r) + sample_exp_innovation(1.0, beta, r);
    });
    CHECK(ks_test(x, [](double t) { return exponential_cdf(t, 1.0); }).p_value > 0.01);
  }
}

TEST_CASE("Bessel-K innovation: symmetric, characteristic function, decomposition") {
  RngHandle rng(7);
  const auto x = draws(1000000, rng, [](RngHandle& r) { return sample_bk_innovation(1.5, 1.0, 0.6, r); });
  CHECK(std::abs(mean(x)) < 3.0 * se_mean(x));
  const double err = cf_sup_error(x, cf_grid(), [](double s) { return cd(bk_innovation_cf(1.5, 1.0, 0.6, s), 0.0); });
  CHECK(err < 0.01);

  for (double p : {0.5, 2.0}) {
    const BKParams bk(p, 1.0);
    const auto a = draws(100000, rng, [&](RngHandle& r) { return 0.7 * sample_bk(bk, r) + sample_bk_innovation(p, 1.0, 0.7, r); });
    const auto b = draws(100000, rng, [&](RngHandle& r) { return sample_bk(bk, r); });
    CHECK(ks_test_2samp(a, b).p_value > 0.01);
  }
}

TEST_CASE("innovation parameter domains") {
  RngHandle rng(8);
  CHECK_THROWS_AS(sample_gamma_innovation(1.0, 1.0, 1.0, rng), DomainError);
  CHECK_THROWS_AS(sample_gamma_innovation(0.0, 1.0, 0.5, rng), DomainError);
  CHECK_THROWS_AS(sample_exp_innovation(1.0, 0.0, rng), DomainError);
  CHECK_THROWS_AS(sample_bk_innovation(1.0, -1.0, 0.5, rng), DomainError);
  CHECK_THROWS_AS(GammaInnovation(1.0, 1.0, 1.5), DomainError);
}

}  // TEST_SUITE
