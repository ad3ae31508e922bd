#pragma once

#include <cstdint>
#include <random>
#include <variant>

namespace bkmcmc {

/// Seeded 64-bit generator owned by exactly one chain.
///
/// The engine is std::mt19937_64 seeded through std::seed_seq from the
/// (seed, stream-id) pair; both are fully specified by the standard, so the
/// variate sequence is reproducible across conforming implementations.
/// Distinct stream-ids give decorrelated engine states and are used to run
/// restarts in parallel. All non-uniform variates are produced by the
/// samplers in this header rather than <random> distributions, whose
/// algorithms are implementation-defined.
class RngHandle {
 public:
  explicit RngHandle(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform01();

  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Scalar laws of the standard variates. Constructors validate the parameter
// domain and throw DomainError.

struct GammaLaw {
  GammaLaw(double shape, double scale);
  double shape;
  double scale;
};

struct ExpLaw {
  explicit ExpLaw(double scale);
  double scale;
};

struct BetaLaw {
  BetaLaw(double a, double b);
  double a;
  double b;
};

struct BernoulliLaw {
  explicit BernoulliLaw(double p);
  double p;
};

struct PoissonLaw {
  explicit PoissonLaw(double rate);
  double rate;
};

struct Uniform01Law {};

struct NormalLaw {
  NormalLaw(double mean, double variance);
  double mean;
  double variance;
};

struct LaplaceLaw {
  explicit LaplaceLaw(double scale);
  double scale;
};

using ScalarLaw = std::variant<GammaLaw, ExpLaw, BetaLaw, BernoulliLaw, PoissonLaw,
                               Uniform01Law, NormalLaw, LaplaceLaw>;

/// Gamm(shape, scale) with density t^(p-1) exp(-t/σ) / (σ^p Γ(p)).
/// Marsaglia–Tsang squeeze for shape >= 1; shape < 1 by the U^(1/p) boost,
/// evaluated in log space. Never returns 0.
double sample_gamma(double shape, double scale, RngHandle& rng);

/// Beta(a, b) as G_a / (G_a + G_b). Result lies strictly inside (0, 1).
double sample_beta(double a, double b, RngHandle& rng);

double sample_exponential(double scale, RngHandle& rng);

/// Returns 1 with probability p, else 0.
int sample_bernoulli(double p, RngHandle& rng);

/// Inversion for rate < 30, PTRS transformed rejection otherwise.
std::int64_t sample_poisson(double rate, RngHandle& rng);

double sample_standard(const ScalarLaw& law, RngHandle& rng);

}  // namespace bkmcmc
