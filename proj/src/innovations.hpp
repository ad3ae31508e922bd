#pragma once

#include <complex>
#include <variant>

#include "rng.hpp"

namespace bkmcmc {

// Innovation laws of the self-decomposable gamma, exponential and Bessel-K
// families: for X from the base law and X_b from its innovation at thinning
// level b, b*X + X_b has the base law again.

struct GammaInnovation {
  GammaInnovation(double shape, double scale, double beta);
  double shape;
  double scale;
  double beta;
};

struct ExpInnovation {
  ExpInnovation(double scale, double beta);
  double scale;
  double beta;
};

struct BkInnovation {
  BkInnovation(double shape, double scale, double beta);
  double shape;
  double scale;
  double beta;
};

using InnovationLaw = std::variant<GammaInnovation, ExpInnovation, BkInnovation>;

/// Compound Poisson sum of tau terms beta^eta_k * theta_k with
/// tau ~ Pois(shape * log(1/beta)), eta_k ~ U(0,1), theta_k ~ Exp(scale).
double sample_gamma_innovation(double shape, double scale, double beta, RngHandle& rng);

/// zeta * w with zeta ~ Bern(1 - beta), w ~ Exp(scale). Atom of mass beta at 0.
double sample_exp_innovation(double scale, double beta, RngHandle& rng);

/// Difference of two independent gamma innovations.
double sample_bk_innovation(double shape, double scale, double beta, RngHandle& rng);

double sample_innovation(const InnovationLaw& law, RngHandle& rng);

/// Closed-form characteristic function of the innovation law.
std::complex<double> innovation_char_fn(const InnovationLaw& law, double s);

}  // namespace bkmcmc
