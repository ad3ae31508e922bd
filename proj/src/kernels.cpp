#include "kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "error.hpp"

namespace bkmcmc {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw DomainError("kernel step parameter beta must lie in (0,1), got " +
                      std::to_string(beta));
  }
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive, got " + std::to_string(v));
  }
}

void check_state(double u) {
  if (!(u >= 0.0)) {
    throw DomainError("kernel state must be nonnegative, got " + std::to_string(u));
  }
}

}  // namespace

RcarGamma::RcarGamma(double shape_, double scale_, double beta_)
    : shape(shape_), scale(scale_), beta(beta_) {
  check_positive(shape, "RCAR shape");
  check_positive(scale, "RCAR scale");
  check_beta(beta);
}

ExpForward::ExpForward(double scale_, double beta_) : scale(scale_), beta(beta_) {
  check_positive(scale, "forward kernel scale");
  check_beta(beta);
}

ExpReverse::ExpReverse(double scale_, double beta_) : scale(scale_), beta(beta_) {
  check_positive(scale, "reverse kernel scale");
  check_beta(beta);
}

Symmetrized::Symmetrized(ExpForward forward_, ExpReverse reverse_)
    : forward(forward_), reverse(reverse_) {
  if (forward.scale != reverse.scale || forward.beta != reverse.beta) {
    throw ConfigError("symmetrized kernel requires identical (sigma, beta) in both halves");
  }
}

double propose_rcar_gamma(double u, double shape, double scale, double beta, RngHandle& rng) {
  check_state(u);
  const double zeta = sample_beta(shape * beta, shape * (1.0 - beta), rng);
  const double w = sample_gamma(shape * (1.0 - beta), scale, rng);
  return zeta * u + w;
}

double propose_exp_forward(double u, double scale, double beta, RngHandle& rng) {
  check_state(u);
  const int zeta = sample_bernoulli(1.0 - beta, rng);
  const double w = sample_exponential(scale, rng);
  return beta * u + (zeta == 1 ? w : 0.0);
}

double propose_exp_reverse(double v, double scale, double beta, RngHandle& rng) {
  check_state(v);
  const double zeta = sample_exponential(1.0, rng);
  return std::min(v / beta, scale * zeta / (1.0 - beta));
}

double propose_scalar(double u, const ScalarKernel& kernel, RngHandle& rng) {
  struct Visitor {
    double u;
    RngHandle& rng;
    double operator()(const RcarGamma& k) const {
      return propose_rcar_gamma(u, k.shape, k.scale, k.beta, rng);
    }
    double operator()(const ExpForward& k) const {
      return propose_exp_forward(u, k.scale, k.beta, rng);
    }
    double operator()(const ExpReverse& k) const {
      return propose_exp_reverse(u, k.scale, k.beta, rng);
    }
    double operator()(const Symmetrized& k) const {
      return propose_symmetrized(
          u,
          [&k](double x, RngHandle& r) {
            return propose_exp_forward(x, k.forward.scale, k.forward.beta, r);
          },
          [&k](double x, RngHandle& r) {
            return propose_exp_reverse(x, k.reverse.scale, k.reverse.beta, r);
          },
          rng);
    }
  };
  return std::visit(Visitor{u, rng}, kernel);
}

std::vector<double> propose_product(std::span<const double> coeffs, const Product& product,
                                    RngHandle& rng) {
  if (coeffs.size() != product.kernels.size()) {
    throw ShapeError("product kernel has " + std::to_string(product.kernels.size()) +
                     " factors but state has " + std::to_string(coeffs.size()) + " coordinates");
  }
  std::vector<double> out(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    out[k] = propose_scalar(coeffs[k], product.kernels[k], rng);
  }
  return out;
}

std::vector<double> propose(std::span<const double> state, const ProposalKernel& kernel,
                            RngHandle& rng) {
  if (const auto* prod = std::get_if<Product>(&kernel)) return propose_product(state, *prod, rng);
  if (state.size() != 1) {
    throw ShapeError("scalar kernel applied to a state of dimension " +
                     std::to_string(state.size()));
  }
  const ScalarKernel scalar = std::visit(
      [](const auto& k) -> ScalarKernel {
        if constexpr (std::is_same_v<std::decay_t<decltype(k)>, Product>) {
          throw Error("unreachable");
        } else {
          return k;
        }
      },
      kernel);
  return {propose_scalar(state[0], scalar, rng)};
}

std::span<const double> default_balance_grid() {
  static constexpr std::array<double, 3> grid{0.5, 1.0, 2.0};
  return grid;
}

DetailedBalanceReport detailed_balance_test(const ScalarProposal& proposal,
                                            const StationarySampler& stationary, std::size_t n,
                                            std::span<const double> grid, RngHandle& rng) {
  if (n == 0) throw ConfigError("detailed balance test needs at least one draw");
  struct Pair {
    double s;
    double t;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) pairs.push_back({grid[i], grid[j]});
  }
  // Off-diagonal pairs carry the asymmetry; (s, s) is symmetric by definition.
  std::vector<std::complex<double>> forward(pairs.size());
  std::vector<std::complex<double>> backward(pairs.size());
  for (std::size_t draw = 0; draw < n; ++draw) {
    const double u = stationary(rng);
    const double v = proposal(u, rng);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const double a = pairs[k].s * u + pairs[k].t * v;
      const double b = pairs[k].t * u + pairs[k].s * v;
      forward[k] += std::complex<double>(std::cos(a), std::sin(a));
      backward[k] += std::complex<double>(std::cos(b), std::sin(b));
    }
  }
  DetailedBalanceReport report;
  report.n = n;
  report.tolerance = 4.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double diff = std::abs(forward[k] - backward[k]) / static_cast<double>(n);
    report.sup_asymmetry = std::max(report.sup_asymmetry, diff);
  }
  report.passed = report.sup_asymmetry <= report.tolerance;
  return report;
}

DetailedBalanceReport detailed_balance_test(const ScalarKernel& kernel,
                                            const StationarySampler& stationary, std::size_t n,
                                            std::span<const double> grid, RngHandle& rng) {
  return detailed_balance_test(
      [&kernel](double u, RngHandle& r) { return propose_scalar(u, kernel, r); }, stationary, n,
      grid, rng);
}

}  // namespace bkmcmc
