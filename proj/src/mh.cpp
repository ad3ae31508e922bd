#include "mh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "error.hpp"

namespace bkmcmc {

namespace {

double evaluate(const Potential& potential, std::span<const double> u, std::int64_t step) {
  double value = 0.0;
  try {
    value = potential(u);
  } catch (const std::exception& e) {
    throw NumericError("potential evaluation failed at step " + std::to_string(step) + ": " +
                       e.what());
  }
  if (std::isnan(value)) {
    throw NumericError("potential returned NaN at step " + std::to_string(step));
  }
  return value;
}

ChainRecord make_record(std::string algorithm, std::size_t dim, const ChainConfig& config) {
  ChainRecord record;
  record.algorithm = std::move(algorithm);
  record.dim = dim;
  record.config = config;
  const std::int64_t post = config.n_steps - config.burnin;
  record.accept.reserve(static_cast<std::size_t>(post));
  const std::int64_t rows = post / config.thin;
  record.samples.reserve(static_cast<std::size_t>(rows) * dim);
  record.stored_accept.reserve(static_cast<std::size_t>(rows));
  return record;
}

// Shared MH loop. `propose(latent, next_latent, next_value, rng)` fills the
// proposal buffers from the current latent state; the state is swapped in
// only on acceptance, so a rejection leaves every buffer of the current
// state untouched.
template <class Proposer>
void run_loop(std::vector<double> latent, std::vector<double> value, Proposer&& propose,
              const Potential& potential, const ChainConfig& config, RngHandle& rng,
              ChainRecord& record) {
  std::vector<double> next_latent(latent.size());
  std::vector<double> next_value(value.size());
  double psi = evaluate(potential, value, 0);
  for (std::int64_t step = 0; step < config.n_steps; ++step) {
    propose(latent, next_latent, next_value, rng);
    const double psi_next = evaluate(potential, next_value, step + 1);
    const bool accepted = mh_accept(psi, psi_next, rng);
    if (accepted) {
      latent.swap(next_latent);
      value.swap(next_value);
      psi = psi_next;
    }
    if (step < config.burnin) continue;
    const std::int64_t j = step - config.burnin;
    record.accept.push_back(accepted ? 1 : 0);
    if (accepted) ++record.n_accepted;
    if ((j + 1) % config.thin == 0) {
      record.samples.insert(record.samples.end(), value.begin(), value.end());
      record.stored_accept.push_back(accepted ? 1 : 0);
    }
  }
}

}  // namespace

bool mh_accept(double psi_u, double psi_v, RngHandle& rng) {
  const double u = rng.uniform01();
  if (std::isnan(psi_u) || std::isnan(psi_v)) {
    throw NumericError("NaN potential passed to the acceptance step");
  }
  if (psi_v == std::numeric_limits<double>::infinity()) return false;
  return std::log(u) < psi_u - psi_v;
}

void validate(const ChainConfig& config) {
  if (config.n_steps < 0) throw ConfigError("n_steps must be nonnegative");
  if (config.burnin < 0 || config.burnin > config.n_steps) {
    throw ConfigError("burnin must lie in [0, n_steps]");
  }
  if (config.thin < 1) throw ConfigError("thin must be at least 1");
  if (!(config.beta > 0.0 && config.beta < 1.0)) {
    throw ConfigError("beta must lie in (0,1), got " + std::to_string(config.beta));
  }
}

void validate(const PriorSpec& prior) {
  if (!(prior.shape > 0.0) || !std::isfinite(prior.shape)) {
    throw ConfigError("prior shape p must be positive");
  }
  if (!(prior.lambda > 0.0) || !std::isfinite(prior.lambda)) {
    throw ConfigError("prior scale lambda must be positive");
  }
  if (prior.gamma.empty()) throw ConfigError("prior needs at least one coefficient");
  for (double g : prior.gamma) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("all prior scales gamma must be positive");
  }
}

std::vector<double> ChainRecord::component(std::size_t k) const {
  if (k >= dim) throw ShapeError("component index out of range");
  const std::size_t n = n_samples();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = samples[i * dim + k];
  return out;
}

std::optional<double> ChainRecord::acceptance_rate() const {
  if (accept.empty()) return std::nullopt;
  return static_cast<double>(n_accepted) / static_cast<double>(accept.size());
}

ChainRecord run_generic_mh(std::span<const double> initial, const ProposalKernel& kernel,
                           const Potential& potential, const ChainConfig& config,
                           RngHandle& rng) {
  validate(config);
  if (initial.empty()) throw ShapeError("initial state is empty");
  ChainRecord record = make_record("generic", initial.size(), config);
  std::vector<double> state(initial.begin(), initial.end());
  auto proposer = [&kernel](const std::vector<double>& cur, std::vector<double>& next_latent,
                            std::vector<double>& next_value, RngHandle& r) {
    next_value = propose(cur, kernel, r);
    next_latent = next_value;
  };
  run_loop(state, state, proposer, potential, config, rng, record);
  return record;
}

int sarsd_integer_shape(double shape) {
  const double r = std::round(shape);
  if (!(shape >= 1.0) || std::fabs(shape - r) > 1e-12) {
    throw ConfigError("SARSD requires a positive integer shape p, got " + std::to_string(shape) +
                      "; use RCAR for non-integer p");
  }
  return static_cast<int>(r);
}

std::size_t lifted_components(const PriorSpec& prior, bool sarsd) {
  const std::size_t sign_groups = prior.kind == PriorKind::BesselK ? 2 : 1;
  if (!sarsd) return sign_groups;
  return sign_groups * static_cast<std::size_t>(sarsd_integer_shape(prior.shape));
}

ChainRecord run_lifted_rcar(const PriorSpec& prior, const Potential& potential,
                            const ChainConfig& config, RngHandle& rng) {
  validate(config);
  validate(prior);
  const std::size_t n = prior.gamma.size();
  const std::size_t m = lifted_components(prior, false);
  const bool bk = prior.kind == PriorKind::BesselK;
  const double p = prior.shape;
  const double beta = config.beta;
  ChainRecord record = make_record(bk ? "rcar-bk" : "rcar-gamma", n, config);
  record.prior = prior;

  std::vector<double> scale(n);
  for (std::size_t l = 0; l < n; ++l) scale[l] = prior.lambda * prior.gamma[l];
  auto assemble = [&](const std::vector<double>& latent, std::vector<double>& value) {
    for (std::size_t l = 0; l < n; ++l) {
      value[l] = bk ? scale[l] * (latent[l * m] - latent[l * m + 1]) : scale[l] * latent[l * m];
    }
  };

  std::vector<double> latent(n * m);
  for (double& x : latent) x = sample_gamma(p, 1.0, rng);
  std::vector<double> value(n);
  assemble(latent, value);

  const double a = p * beta;
  const double b = p * (1.0 - beta);
  auto proposer = [&](const std::vector<double>& cur, std::vector<double>& next_latent,
                      std::vector<double>& next_value, RngHandle& r) {
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double zeta = sample_beta(a, b, r);
      const double w = sample_gamma(b, 1.0, r);
      next_latent[i] = zeta * cur[i] + w;
    }
    assemble(next_latent, next_value);
  };
  run_loop(std::move(latent), std::move(value), proposer, potential, config, rng, record);
  return record;
}

ChainRecord run_lifted_sarsd(const PriorSpec& prior, const Potential& potential,
                             const ChainConfig& config, RngHandle& rng) {
  validate(config);
  validate(prior);
  const int p = sarsd_integer_shape(prior.shape);
  const std::size_t n = prior.gamma.size();
  const std::size_t m = lifted_components(prior, true);
  const bool bk = prior.kind == PriorKind::BesselK;
  const double beta = config.beta;
  ChainRecord record = make_record(bk ? "sarsd-bk" : "sarsd-gamma", n, config);
  record.prior = prior;

  const auto half = static_cast<std::size_t>(p);
  std::vector<double> scale(n);
  for (std::size_t l = 0; l < n; ++l) scale[l] = prior.lambda * prior.gamma[l];
  auto assemble = [&](const std::vector<double>& latent, std::vector<double>& value) {
    for (std::size_t l = 0; l < n; ++l) {
      const double* row = latent.data() + l * m;
      double pos = 0.0;
      for (std::size_t k = 0; k < half; ++k) pos += row[k];
      double neg = 0.0;
      if (bk) {
        for (std::size_t k = half; k < m; ++k) neg += row[k];
      }
      value[l] = scale[l] * (pos - neg);
    }
  };

  std::vector<double> latent(n * m);
  for (double& x : latent) x = sample_exponential(1.0, rng);
  std::vector<double> value(n);
  assemble(latent, value);

  auto proposer = [&](const std::vector<double>& cur, std::vector<double>& next_latent,
                      std::vector<double>& next_value, RngHandle& r) {
    const bool forward = sample_bernoulli(0.5, r) == 1;
    if (forward) {
      for (std::size_t i = 0; i < cur.size(); ++i) {
        const int zeta = sample_bernoulli(1.0 - beta, r);
        const double w = sample_exponential(1.0, r);
        next_latent[i] = beta * cur[i] + (zeta == 1 ? w : 0.0);
      }
    } else {
      for (std::size_t i = 0; i < cur.size(); ++i) {
        const double w = sample_exponential(1.0, r);
        next_latent[i] = std::min(cur[i] / beta, w / (1.0 - beta));
      }
    }
    assemble(next_latent, next_value);
  };
  run_loop(std::move(latent), std::move(value), proposer, potential, config, rng, record);
  return record;
}

}  // namespace bkmcmc
