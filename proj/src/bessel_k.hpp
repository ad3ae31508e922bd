#pragma once

#include "rng.hpp"

namespace bkmcmc {

/// Shape p > 0 and scale sigma > 0 of the Bessel-K law BK(p, sigma).
struct BKParams {
  BKParams(double shape, double scale);
  double shape;
  double scale;
};

/// sigma * (xi - xi') with xi, xi' ~ Gamm(p, 1) independent.
double sample_bk(const BKParams& params, RngHandle& rng);

/// Modified Bessel function of the second kind K_nu(x), x > 0.
///
/// Evaluated from the integral representation
///   K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt
/// with the factor exp(-x) pulled out, the tail truncated at relative
/// mass 1e-18 and the remainder integrated with adaptive Gauss–Legendre
/// panels. Intended for |nu| <= 1; larger orders work but are slower.
double bessel_k_nu(double nu, double x);

/// Lebesgue density of BK(p, sigma) at t.
///
/// At t = 0 the density is finite only for p > 1/2, where the
/// small-argument limit Gamma(p - 1/2) / (2 sqrt(pi) Gamma(p) sigma) is returned;
/// for p <= 1/2 a SingularPointError is thrown.
double bk_density(const BKParams& params, double t);

/// (1 + (s sigma)^2)^(-p).
double bk_char_fn(const BKParams& params, double s);

}  // namespace bkmcmc
