#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace bkmcmc {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream_id) {
  // seed_seq consumes 32-bit words; a tag word separates the two fields.
  return std::seed_seq{static_cast<std::uint32_t>(seed),
                       static_cast<std::uint32_t>(seed >> 32),
                       0x6b6d6362u,
                       static_cast<std::uint32_t>(stream_id),
                       static_cast<std::uint32_t>(stream_id >> 32)};
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  auto seq = make_seed_seq(seed, stream_id);
  return std::mt19937_64(seq);
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be a positive finite number, got " +
                      std::to_string(value));
  }
}

double gamma_shape_at_least_one(double shape, RngHandle& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::int64_t poisson_inversion(double rate, RngHandle& rng) {
  const double u = rng.uniform01();
  double term = std::exp(-rate);
  double cumulative = term;
  std::int64_t k = 0;
  // The cap only matters when cumulative stalls below u by round-off.
  while (u > cumulative && k < 1000) {
    ++k;
    term *= rate / static_cast<double>(k);
    cumulative += term;
  }
  return k;
}

// Hormann's PTRS (transformed rejection with squeeze).
std::int64_t poisson_ptrs(double rate, RngHandle& rng) {
  const double slam = std::sqrt(rate);
  const double loglam = std::log(rate);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform01() - 0.5;
    const double v = rng.uniform01();
    const double us = 0.5 - std::fabs(u);
    const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + rate + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    const double kd = static_cast<double>(k);
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -rate + kd * loglam - std::lgamma(kd + 1.0)) {
      return k;
    }
  }
}

}  // namespace

RngHandle::RngHandle(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double RngHandle::uniform01() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngHandle::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double x = 0.0;
  double y = 0.0;
  double r2 = 0.0;
  do {
    x = 2.0 * uniform01() - 1.0;
    y = 2.0 * uniform01() - 1.0;
    r2 = x * x + y * y;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double f = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_normal_ = y * f;
  has_spare_ = true;
  return x * f;
}

GammaLaw::GammaLaw(double shape_, double scale_) : shape(shape_), scale(scale_) {
  require_positive(shape, "gamma shape");
  require_positive(scale, "gamma scale");
}

ExpLaw::ExpLaw(double scale_) : scale(scale_) { require_positive(scale, "exponential scale"); }

BetaLaw::BetaLaw(double a_, double b_) : a(a_), b(b_) {
  require_positive(a, "beta shape a");
  require_positive(b, "beta shape b");
}

BernoulliLaw::BernoulliLaw(double p_) : p(p_) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("bernoulli parameter must lie in (0,1), got " + std::to_string(p));
  }
}

PoissonLaw::PoissonLaw(double rate_) : rate(rate_) { require_positive(rate, "poisson rate"); }

NormalLaw::NormalLaw(double mean_, double variance_) : mean(mean_), variance(variance_) {
  if (!std::isfinite(mean)) throw DomainError("normal mean must be finite");
  require_positive(variance, "normal variance");
}

LaplaceLaw::LaplaceLaw(double scale_) : scale(scale_) { require_positive(scale, "laplace scale"); }

double sample_gamma(double shape, double scale, RngHandle& rng) {
  require_positive(shape, "gamma shape");
  require_positive(scale, "gamma scale");
  if (shape >= 1.0) return scale * gamma_shape_at_least_one(shape, rng);
  const double boosted = gamma_shape_at_least_one(shape + 1.0, rng);
  const double log_value = std::log(boosted) + std::log(rng.uniform01()) / shape;
  const double value = std::max(std::exp(log_value), std::numeric_limits<double>::min());
  return std::max(scale * value, std::numeric_limits<double>::min());
}

double sample_beta(double a, double b, RngHandle& rng) {
  require_positive(a, "beta shape a");
  require_positive(b, "beta shape b");
  const double x = sample_gamma(a, 1.0, rng);
  const double y = sample_gamma(b, 1.0, rng);
  const double ratio = x / (x + y);
  // Very small shapes make one gamma negligible next to the other; clamp to
  // the nearest representable interior points.
  constexpr double upper = 1.0 - 0x1.0p-53;
  return std::clamp(ratio, std::numeric_limits<double>::min(), upper);
}

double sample_exponential(double scale, RngHandle& rng) {
  require_positive(scale, "exponential scale");
  return -scale * std::log(rng.uniform01());
}

int sample_bernoulli(double p, RngHandle& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("bernoulli parameter must lie in [0,1], got " + std::to_string(p));
  }
  return rng.uniform01() < p ? 1 : 0;
}

std::int64_t sample_poisson(double rate, RngHandle& rng) {
  require_positive(rate, "poisson rate");
  return rate < 30.0 ? poisson_inversion(rate, rng) : poisson_ptrs(rate, rng);
}

double sample_standard(const ScalarLaw& law, RngHandle& rng) {
  struct Visitor {
    RngHandle& rng;
    double operator()(const GammaLaw& l) const { return sample_gamma(l.shape, l.scale, rng); }
    double operator()(const ExpLaw& l) const { return sample_exponential(l.scale, rng); }
    double operator()(const BetaLaw& l) const { return sample_beta(l.a, l.b, rng); }
    double operator()(const BernoulliLaw& l) const { return sample_bernoulli(l.p, rng); }
    double operator()(const PoissonLaw& l) const {
      return static_cast<double>(sample_poisson(l.rate, rng));
    }
    double operator()(const Uniform01Law&) const { return rng.uniform01(); }
    double operator()(const NormalLaw& l) const {
      return l.mean + std::sqrt(l.variance) * rng.normal();
    }
    double operator()(const LaplaceLaw& l) const {
      const double u = rng.uniform01() - 0.5;
      const double magnitude = -l.scale * std::log(1.0 - 2.0 * std::fabs(u));
      return u < 0.0 ? -magnitude : magnitude;
    }
  };
  return std::visit(Visitor{rng}, law);
}

}  // namespace bkmcmc
