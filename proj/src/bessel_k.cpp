#include "bessel_k.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"
#include "quadrature.hpp"

namespace bkmcmc {

namespace {

// Relative tail mass dropped by truncating the integral representation.
constexpr double kTailLog = 41.5;  // exp(-41.5) < 1e-18

// Smallest T with x (cosh T - 1) - |nu| T >= kTailLog.
double truncation_point(double nu, double x) {
  const double a = std::fabs(nu);
  double t = std::acosh(1.0 + kTailLog / x);
  for (int i = 0; i < 60; ++i) {
    const double next = std::acosh(1.0 + (kTailLog + a * t) / x);
    if (std::fabs(next - t) < 1e-12) return next;
    t = next;
  }
  return t;
}

}  // namespace

BKParams::BKParams(double shape_, double scale_) : shape(shape_), scale(scale_) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("Bessel-K shape must be positive, got " + std::to_string(shape));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("Bessel-K scale must be positive, got " + std::to_string(scale));
  }
}

double sample_bk(const BKParams& params, RngHandle& rng) {
  const double xi = sample_gamma(params.shape, 1.0, rng);
  const double xi_prime = sample_gamma(params.shape, 1.0, rng);
  return params.scale * (xi - xi_prime);
}

double bessel_k_nu(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("bessel_k_nu requires x > 0, got " + std::to_string(x));
  }
  if (!std::isfinite(nu)) throw DomainError("bessel_k_nu requires a finite order");
  const double upper = truncation_point(nu, x);
  auto integrand = [nu, x](double t) {
    // cosh t - 1 = 2 sinh^2(t/2) avoids cancellation near t = 0.
    const double s = std::sinh(0.5 * t);
    return std::exp(-2.0 * x * s * s) * std::cosh(nu * t);
  };
  // Fixed sub-panels keep the adaptive rule from missing the interior peak
  // that appears for small x and nonzero order.
  constexpr int kPieces = 8;
  double integral = 0.0;
  for (int i = 0; i < kPieces; ++i) {
    const double a = upper * i / kPieces;
    const double b = upper * (i + 1) / kPieces;
    integral += integrate_adaptive(integrand, a, b, 1e-14, 1e-300, 30);
  }
  return std::exp(-x) * integral;
}

double bk_density(const BKParams& params, double t) {
  const double p = params.shape;
  const double sigma = params.scale;
  const double nu = p - 0.5;
  if (t == 0.0) {
    if (p <= 0.5) {
      throw SingularPointError("Bessel-K density is unbounded at 0 for shape <= 1/2");
    }
    return std::tgamma(nu) / (2.0 * std::sqrt(std::numbers::pi) * std::tgamma(p) * sigma);
  }
  const double a = std::fabs(t);
  const double norm =
      std::sqrt(std::numbers::pi) * std::tgamma(p) * std::pow(sigma, p + 0.5) * std::pow(2.0, nu);
  return std::pow(a, nu) * bessel_k_nu(nu, a / sigma) / norm;
}

double bk_char_fn(const BKParams& params, double s) {
  const double x = s * params.scale;
  return std::pow(1.0 + x * x, -params.shape);
}

}  // namespace bkmcmc
