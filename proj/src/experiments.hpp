#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "forward.hpp"
#include "mh.hpp"

namespace bkmcmc {

enum class Algorithm { Rcar, Sarsd };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algorithm);

// Stream id reserved for synthetic data, disjoint from the chain streams
// 0, 1, ..., restarts - 1.
constexpr std::uint64_t kDataStream = 0x64617461;

struct ExperimentConfig {
  std::string experiment = "density2d";  // density2d | denoise | deconvolve
  std::string algorithm = "rcar";        // rcar | sarsd | both (denoise beta sweep only)
  double p = 1.0;
  double beta = 0.3;
  double lambda = 1.0;
  double eps = 1.0 / 16.0;
  std::int64_t n_coeffs = 2;
  std::int64_t n_steps = 800000;
  std::int64_t burnin = 10000;
  std::int64_t thin = 1;
  std::int64_t restarts = 1;
  std::uint64_t seed = 1729;
  std::string output_dir = "out";
  std::string sweep = "none";  // denoise: beta; deconvolve: N | p | lambda | eps
  std::vector<double> sweep_values;  // empty selects the default grid
  std::vector<std::int64_t> sizes;   // denoise beta sweep dimensions
  std::int64_t max_lag = 200;
  std::string data_path;  // deconvolve: reuse an existing data.csv
};

/// Default settings of each experiment. A sweep other than "none" switches
/// the run lengths to the sweep protocol (shorter chains, five restarts).
ExperimentConfig default_experiment(const std::string& experiment,
                                    const std::string& sweep = "none");

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// key = value text understood by the CLI's --config option.
std::string to_ini(const ExperimentConfig& config);

/// Default sweep grid for (experiment, sweep).
std::vector<double> default_sweep_values(const std::string& experiment, const std::string& sweep);

ChainRecord run_chain(Algorithm algorithm, const PriorSpec& prior, const Potential& potential,
                      const ChainConfig& config);

/// Runs job(stream_id) for stream ids 0..restarts-1 concurrently; results in stream order.
std::vector<ChainRecord> run_restarts(const std::function<ChainRecord(std::uint64_t)>& job,
                                      std::int64_t restarts);

ChainConfig chain_config(const ExperimentConfig& config, std::uint64_t stream_id);

// density2d
PriorSpec density2d_prior(double p);
ChainRecord density2d_chain(const ExperimentConfig& config, std::uint64_t stream_id);

// denoise
PriorSpec denoise_prior(double p, std::size_t n);
std::vector<double> denoise_data(std::uint64_t seed, std::size_t n);
ChainRecord denoise_chain(const ExperimentConfig& config, std::span<const double> y,
                          std::uint64_t stream_id);

// deconvolve
DeconvSetup deconv_setup(const ExperimentConfig& config);
PriorSpec deconv_prior(const ExperimentConfig& config);
DeconvData deconv_data(const ExperimentConfig& config);
ChainRecord deconv_chain(const ExperimentConfig& config, const DeconvData& data,
                         std::uint64_t stream_id);

struct SweepPoint {
  std::string parameter;
  double value = 0.0;
  std::string algorithm;
  std::int64_t n_coeffs = 0;
  double beta = 0.0;
  std::vector<double> acceptance;  // one per restart
  double mean_acceptance = 0.0;
  double min_ess = 0.0;  // restart averages, per 1e4 steps
  double mean_ess = 0.0;
  double max_ess = 0.0;
};

/// Acceptance over (algorithm, N, beta) for the denoising problem.
std::vector<SweepPoint> denoise_beta_sweep(const ExperimentConfig& config,
                                           std::span<const std::int64_t> sizes,
                                           std::span<const double> betas);

/// Acceptance over one deconvolution parameter: "N", "p", "lambda" or "eps".
/// The eps sweep regenerates the data for every kernel width.
std::vector<SweepPoint> deconv_sweep(const ExperimentConfig& config, const std::string& parameter,
                                     std::span<const double> values);

struct RunSummary {
  nlohmann::json summary;
  std::vector<std::string> artifacts;
};

/// Runs the configured experiment and writes its artifacts (chain CSV/JSON,
/// diagnostics, manifest, run.ini, experiment-specific tables) to output_dir.
RunSummary run_experiment(const ExperimentConfig& config);

/// Diagnostics for an existing chain CSV, written to output_dir.
RunSummary run_diagnose(const std::string& chain_csv, const std::string& output_dir,
                        std::int64_t max_lag);

std::string library_version();

}  // namespace bkmcmc
