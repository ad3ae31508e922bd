#pragma once

#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "rng.hpp"

namespace bkmcmc {

// Scalar proposal kernels on [0, inf). Every kernel validates p, sigma > 0 and
// beta in (0,1) at construction.

/// v = zeta u + w, zeta ~ Beta(p beta, p(1-beta)), w ~ Gamm(p(1-beta), sigma).
/// Reversible with respect to Gamm(p, sigma).
struct RcarGamma {
  RcarGamma(double shape, double scale, double beta);
  double shape;
  double scale;
  double beta;
};

/// v = beta u + zeta w, zeta ~ Bern(1-beta), w ~ Exp(sigma).
/// Preserves Exp(sigma) but is not reversible.
struct ExpForward {
  ExpForward(double scale, double beta);
  double scale;
  double beta;
};

/// Time reversal of ExpForward: v = min(u/beta, sigma zeta/(1-beta)), zeta ~ Exp(1).
struct ExpReverse {
  ExpReverse(double scale, double beta);
  double scale;
  double beta;
};

/// Fair Bernoulli mixture of an exponential forward kernel and its reversal.
struct Symmetrized {
  Symmetrized(ExpForward forward, ExpReverse reverse);
  ExpForward forward;
  ExpReverse reverse;
};

using ScalarKernel = std::variant<RcarGamma, ExpForward, ExpReverse, Symmetrized>;

/// Independent per-coordinate kernels.
struct Product {
  std::vector<ScalarKernel> kernels;
};

using ProposalKernel = std::variant<RcarGamma, ExpForward, ExpReverse, Symmetrized, Product>;

double propose_rcar_gamma(double u, double shape, double scale, double beta, RngHandle& rng);
double propose_exp_forward(double u, double scale, double beta, RngHandle& rng);
double propose_exp_reverse(double v, double scale, double beta, RngHandle& rng);

/// Draws t ~ Bern(1/2); t = 1 applies `forward`, t = 0 applies `reverse`.
/// The branch taken is reported through `took_forward` when non-null.
template <class Forward, class Reverse>
double propose_symmetrized(double u, Forward&& forward, Reverse&& reverse, RngHandle& rng,
                           bool* took_forward = nullptr) {
  const bool fwd = sample_bernoulli(0.5, rng) == 1;
  if (took_forward != nullptr) *took_forward = fwd;
  return fwd ? forward(u, rng) : reverse(u, rng);
}

double propose_scalar(double u, const ScalarKernel& kernel, RngHandle& rng);

std::vector<double> propose_product(std::span<const double> coeffs, const Product& product,
                                    RngHandle& rng);

/// Proposes from any kernel. Scalar kernels require a single coordinate.
std::vector<double> propose(std::span<const double> state, const ProposalKernel& kernel,
                            RngHandle& rng);

struct DetailedBalanceReport {
  double sup_asymmetry = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::size_t n = 0;
};

using ScalarProposal = std::function<double(double, RngHandle&)>;
using StationarySampler = std::function<double(RngHandle&)>;

/// Empirical joint characteristic function symmetry check: draws u from the
/// stationary law, v from the kernel, and compares tau(s, s') = E exp(i(s u + s' v))
/// with tau(s', s) over all unordered pairs of `grid`. Passes when the sup of
/// the modulus difference is at most 4/sqrt(n).
DetailedBalanceReport detailed_balance_test(const ScalarProposal& proposal,
                                            const StationarySampler& stationary, std::size_t n,
                                            std::span<const double> grid, RngHandle& rng);

DetailedBalanceReport detailed_balance_test(const ScalarKernel& kernel,
                                            const StationarySampler& stationary, std::size_t n,
                                            std::span<const double> grid, RngHandle& rng);

/// Default CF grid {0.5, 1, 2}.
std::span<const double> default_balance_grid();

}  // namespace bkmcmc
