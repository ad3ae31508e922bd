#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kernels.hpp"
#include "rng.hpp"

namespace bkmcmc {

/// Likelihood potential Psi(u). May return +inf; NaN is an error.
using Potential = std::function<double(std::span<const double>)>;

/// Accepts with probability min(1, exp(psi_u - psi_v)). Always consumes
/// exactly one uniform so chains stay aligned whatever the outcome.
bool mh_accept(double psi_u, double psi_v, RngHandle& rng);

struct ChainConfig {
  std::int64_t n_steps = 0;
  std::int64_t burnin = 0;
  std::int64_t thin = 1;
  double beta = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Throws ConfigError unless 0 <= burnin <= n_steps, thin >= 1, beta in (0,1).
void validate(const ChainConfig& config);

enum class PriorKind { BesselK, Gamma };

/// Product prior u_l = lambda * gamma_l * eta_l with eta_l i.i.d. BK(p,1) or Gamm(p,1).
struct PriorSpec {
  PriorKind kind = PriorKind::BesselK;
  double shape = 1.0;
  std::vector<double> gamma;  // per-coefficient scales, all > 0
  double lambda = 1.0;
};

void validate(const PriorSpec& prior);

struct ChainRecord {
  std::size_t dim = 0;
  std::vector<double> samples;       // row-major, one row per stored sample
  std::vector<std::uint8_t> accept;  // one flag per post-burn-in step
  std::vector<std::uint8_t> stored_accept;  // flag of the step that produced each row
  std::int64_t n_accepted = 0;

  std::string algorithm;
  ChainConfig config;
  std::optional<PriorSpec> prior;

  std::size_t n_samples() const { return dim == 0 ? 0 : samples.size() / dim; }
  std::span<const double> row(std::size_t i) const { return {samples.data() + i * dim, dim}; }
  /// Column k of the stored samples.
  std::vector<double> component(std::size_t k) const;
  /// Undefined (nullopt) when there are no post-burn-in steps.
  std::optional<double> acceptance_rate() const;
};

/// Plain MH with a fixed kernel acting directly on the parameter.
ChainRecord run_generic_mh(std::span<const double> initial, const ProposalKernel& kernel,
                           const Potential& potential, const ChainConfig& config,
                           RngHandle& rng);

/// Lifted RCAR over a product prior; each coefficient carries one (gamma
/// prior) or two (Bessel-K prior) latent Gamm(p,1) components.
ChainRecord run_lifted_rcar(const PriorSpec& prior, const Potential& potential,
                            const ChainConfig& config, RngHandle& rng);

/// Lifted SARSD over a product prior with integer shape p; each coefficient
/// carries p (gamma prior) or 2p (Bessel-K prior) latent Exp(1) components.
ChainRecord run_lifted_sarsd(const PriorSpec& prior, const Potential& potential,
                             const ChainConfig& config, RngHandle& rng);

/// Number of latent components per coefficient for the given algorithm.
std::size_t lifted_components(const PriorSpec& prior, bool sarsd);

/// Throws ConfigError unless p is a positive integer.
int sarsd_integer_shape(double shape);

}  // namespace bkmcmc
