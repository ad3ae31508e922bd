#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>

#include "chain_io.hpp"
#include "diagnostics.hpp"
#include "error.hpp"
#include "priors.hpp"

#ifndef BKMCMC_VERSION
#define BKMCMC_VERSION "0.0.0"
#endif

namespace bkmcmc {

namespace fs = std::filesystem;

std::string library_version() { return BKMCMC_VERSION; }

Algorithm parse_algorithm(const std::string& name) {
  if (name == "rcar") return Algorithm::Rcar;
  if (name == "sarsd") return Algorithm::Sarsd;
  throw ConfigError("algorithm: expected 'rcar' or 'sarsd', got '" + name + "'");
}

std::string to_string(Algorithm algorithm) {
  return algorithm == Algorithm::Rcar ? "rcar" : "sarsd";
}

ExperimentConfig default_experiment(const std::string& experiment, const std::string& sweep) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "density2d") {
    if (sweep != "none") throw ConfigError("sweep: density2d has no sweep modes");
    return c;
  }
  if (experiment == "denoise") {
    c.p = 1.0;
    c.beta = 0.9;
    c.n_coeffs = 10;
    c.n_steps = 90000;
    c.burnin = 50000;
    if (sweep == "beta") {
      c.sweep = sweep;
      c.n_steps = 60000;
      c.burnin = 40000;
      c.restarts = 5;
    } else if (sweep != "none") {
      throw ConfigError("sweep: denoise supports only 'beta'");
    }
    return c;
  }
  if (experiment == "deconvolve") {
    c.p = 2.0 / 3.0;
    c.beta = 0.97;
    c.lambda = 1.0;
    c.eps = 1.0 / 16.0;
    c.n_coeffs = 32;
    c.n_steps = 500000;
    c.burnin = 50000;
    c.thin = 10;
    c.max_lag = 1000;
    if (sweep == "N" || sweep == "p" || sweep == "lambda" || sweep == "eps") {
      c.sweep = sweep;
      c.n_steps = 250000;
      c.restarts = 5;
    } else if (sweep != "none") {
      throw ConfigError("sweep: deconvolve supports 'N', 'p', 'lambda' or 'eps'");
    }
    return c;
  }
  throw ConfigError("experiment: unknown experiment '" + experiment + "'");
}

std::vector<double> default_sweep_values(const std::string& experiment, const std::string& sweep) {
  if (experiment == "denoise" && sweep == "beta") {
    return {0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 0.975, 0.99};
  }
  if (experiment == "deconvolve") {
    if (sweep == "N") return {8, 16, 32, 64, 128};
    if (sweep == "p") return {0.2, 0.4, 0.6, 0.8, 1.0};
    if (sweep == "lambda") return {0.25, 0.5, 1.0, 2.0, 4.0};
    if (sweep == "eps") return {1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0};
  }
  throw ConfigError("sweep: '" + sweep + "' is not available for experiment '" + experiment + "'");
}

void validate(const ExperimentConfig& c) {
  if (c.experiment != "density2d" && c.experiment != "denoise" && c.experiment != "deconvolve") {
    throw ConfigError("experiment: unknown experiment '" + c.experiment + "'");
  }
  const bool both = c.algorithm == "both";
  if (both) {
    if (!(c.experiment == "denoise" && c.sweep == "beta")) {
      throw ConfigError("algorithm: 'both' is only accepted for the denoise beta sweep");
    }
  } else {
    parse_algorithm(c.algorithm);
  }
  if (!(c.p > 0.0) || !std::isfinite(c.p)) throw ConfigError("p: shape must be positive");
  if (!(c.beta > 0.0 && c.beta < 1.0)) throw ConfigError("beta: must lie in (0,1)");
  if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) throw ConfigError("lambda: must be positive");
  if (!(c.eps > 0.0 && c.eps <= 0.25)) throw ConfigError("eps: must lie in (0, 1/4]");
  if (c.n_coeffs < 1) throw ConfigError("N: must be positive");
  if (c.n_steps < 0) throw ConfigError("n-steps: must be nonnegative");
  if (c.burnin < 0 || c.burnin > c.n_steps) throw ConfigError("burnin: must lie in [0, n-steps]");
  if (c.thin < 1) throw ConfigError("thin: must be at least 1");
  if (c.restarts < 1) throw ConfigError("restarts: must be at least 1");
  if (c.max_lag < 0) throw ConfigError("max-lag: must be nonnegative");
  if (c.output_dir.empty()) throw ConfigError("output-dir: must not be empty");
  const bool needs_integer = both || c.algorithm == "sarsd";
  const bool p_swept = c.experiment == "deconvolve" && c.sweep == "p";
  if (needs_integer && !p_swept) {
    try {
      sarsd_integer_shape(c.p);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("p: ") + e.what());
    }
  }
  if (c.experiment == "density2d" && c.n_coeffs != 2) {
    throw ConfigError("N: the 2D density problem has exactly 2 coefficients");
  }
  if (c.experiment == "deconvolve") {
    if (c.n_coeffs < 2 || c.n_coeffs > 128) throw ConfigError("N: must lie in [2, 128]");
  }
  if (c.sweep != "none") {
    const std::vector<double> values =
        c.sweep_values.empty() ? default_sweep_values(c.experiment, c.sweep) : c.sweep_values;
    for (double v : values) {
      if (c.sweep == "beta" && !(v > 0.0 && v < 1.0)) throw ConfigError("sweep-values: beta outside (0,1)");
      if (c.sweep == "N" && (v < 2 || v > 128 || v != std::floor(v))) {
        throw ConfigError("sweep-values: N must be an integer in [2, 128]");
      }
      if (c.sweep == "p" && !(v > 0.0)) throw ConfigError("sweep-values: p must be positive");
      if (c.sweep == "p" && c.algorithm == "sarsd") sarsd_integer_shape(v);
      if (c.sweep == "lambda" && !(v > 0.0)) throw ConfigError("sweep-values: lambda must be positive");
      if (c.sweep == "eps" && !(v > 0.0 && v <= 0.25)) {
        throw ConfigError("sweep-values: eps must lie in (0, 1/4]");
      }
    }
    for (std::int64_t n : c.sizes) {
      if (n < 1) throw ConfigError("sizes: dimensions must be positive");
    }
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"experiment", c.experiment}, {"algorithm", c.algorithm},   {"p", c.p},
          {"beta", c.beta},             {"lambda", c.lambda},         {"eps", c.eps},
          {"N", c.n_coeffs},            {"n_steps", c.n_steps},       {"burnin", c.burnin},
          {"thin", c.thin},             {"restarts", c.restarts},     {"seed", c.seed},
          {"output_dir", c.output_dir}, {"sweep", c.sweep},           {"sweep_values", c.sweep_values},
          {"sizes", c.sizes},           {"max_lag", c.max_lag},       {"data_path", c.data_path}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  const nlohmann::json& src = j.contains("config") ? j.at("config") : j;
  const std::string sweep = src.contains("sweep") ? src.at("sweep").get<std::string>() : "none";
  ExperimentConfig c = default_experiment(src.at("experiment").get<std::string>(), sweep);
  auto take = [&src](const char* key, auto& field) {
    if (src.contains(key) && !src.at(key).is_null()) src.at(key).get_to(field);
  };
  take("algorithm", c.algorithm);
  take("p", c.p);
  take("beta", c.beta);
  take("lambda", c.lambda);
  take("eps", c.eps);
  take("N", c.n_coeffs);
  take("n_steps", c.n_steps);
  take("burnin", c.burnin);
  take("thin", c.thin);
  take("restarts", c.restarts);
  take("seed", c.seed);
  take("output_dir", c.output_dir);
  take("sweep", c.sweep);
  take("sweep_values", c.sweep_values);
  take("sizes", c.sizes);
  take("max_lag", c.max_lag);
  take("data_path", c.data_path);
  return c;
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream out;
  auto list = [](const auto& values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ",";
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(values[i])>>) {
        s += format_double(values[i]);
      } else {
        s += std::to_string(values[i]);
      }
    }
    return s + "]";
  };
  out << "# " << c.experiment << " run configuration\n";
  out << "algorithm=" << c.algorithm << "\n";
  out << "p=" << format_double(c.p) << "\n";
  out << "beta=" << format_double(c.beta) << "\n";
  out << "lambda=" << format_double(c.lambda) << "\n";
  out << "eps=" << format_double(c.eps) << "\n";
  out << "N=" << c.n_coeffs << "\n";
  out << "n-steps=" << c.n_steps << "\n";
  out << "burnin=" << c.burnin << "\n";
  out << "thin=" << c.thin << "\n";
  out << "restarts=" << c.restarts << "\n";
  out << "seed=" << c.seed << "\n";
  out << "output-dir=\"" << c.output_dir << "\"\n";
  out << "sweep=" << c.sweep << "\n";
  if (!c.sweep_values.empty()) out << "sweep-values=" << list(c.sweep_values) << "\n";
  if (!c.sizes.empty()) out << "sizes=" << list(c.sizes) << "\n";
  out << "max-lag=" << c.max_lag << "\n";
  if (!c.data_path.empty()) out << "data=\"" << c.data_path << "\"\n";
  return out.str();
}

ChainRecord run_chain(Algorithm algorithm, const PriorSpec& prior, const Potential& potential,
                      const ChainConfig& config) {
  RngHandle rng(config.seed, config.stream_id);
  return algorithm == Algorithm::Rcar ? run_lifted_rcar(prior, potential, config, rng)
                                      : run_lifted_sarsd(prior, potential, config, rng);
}

std::vector<ChainRecord> run_restarts(const std::function<ChainRecord(std::uint64_t)>& job,
                                      std::int64_t restarts) {
  std::vector<std::future<ChainRecord>> futures;
  futures.reserve(static_cast<std::size_t>(restarts));
  for (std::int64_t r = 0; r < restarts; ++r) {
    futures.push_back(std::async(std::launch::async, job, static_cast<std::uint64_t>(r)));
  }
  std::vector<ChainRecord> out;
  out.reserve(futures.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

ChainConfig chain_config(const ExperimentConfig& c, std::uint64_t stream_id) {
  ChainConfig cc;
  cc.n_steps = c.n_steps;
  cc.burnin = c.burnin;
  cc.thin = c.thin;
  cc.beta = c.beta;
  cc.seed = c.seed;
  cc.stream_id = stream_id;
  return cc;
}

PriorSpec density2d_prior(double p) { return {PriorKind::BesselK, p, {1.0, 1.0}, 1.0}; }

ChainRecord density2d_chain(const ExperimentConfig& c, std::uint64_t stream_id) {
  return run_chain(parse_algorithm(c.algorithm), density2d_prior(c.p),
                   [](std::span<const double> u) { return linear2d_potential(u); },
                   chain_config(c, stream_id));
}

PriorSpec denoise_prior(double p, std::size_t n) {
  return {PriorKind::Gamma, p, std::vector<double>(n, 1.0), 1.0};
}

std::vector<double> denoise_data(std::uint64_t seed, std::size_t n) {
  RngHandle rng(seed, kDataStream);
  return make_denoising_data(n, rng);
}

ChainRecord denoise_chain(const ExperimentConfig& c, std::span<const double> y,
                          std::uint64_t stream_id) {
  std::vector<double> data(y.begin(), y.end());
  return run_chain(
      parse_algorithm(c.algorithm), denoise_prior(c.p, data.size()),
      [data](std::span<const double> u) { return denoising_potential(u, data); },
      chain_config(c, stream_id));
}

DeconvSetup deconv_setup(const ExperimentConfig& c) {
  DeconvSetup s;
  s.eps = c.eps;
  return s;
}

PriorSpec deconv_prior(const ExperimentConfig& c) {
  return {PriorKind::BesselK, c.p, deconv_gamma_sequence(static_cast<std::size_t>(c.n_coeffs)),
          c.lambda};
}

namespace {

DeconvData read_deconv_data(const fs::path& path, const DeconvSetup& setup) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file " + path.string());
  std::string line;
  std::getline(in, line);
  DeconvData d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',')) {
      throw IoError(path.string() + ": expected columns t,clean,y");
    }
    d.points.push_back(std::stod(a));
    d.clean.push_back(std::stod(b));
    d.y.push_back(std::stod(c));
  }
  if (d.y.size() != setup.n_obs) {
    throw IoError(path.string() + ": expected " + std::to_string(setup.n_obs) + " observations");
  }
  return d;
}

}  // namespace

DeconvData deconv_data(const ExperimentConfig& c) {
  const DeconvSetup setup = deconv_setup(c);
  if (!c.data_path.empty()) return read_deconv_data(c.data_path, setup);
  RngHandle rng(c.seed, kDataStream);
  return make_synthetic_data(setup, rng);
}

ChainRecord deconv_chain(const ExperimentConfig& c, const DeconvData& data,
                         std::uint64_t stream_id) {
  auto forward = std::make_shared<DeconvForward>(deconv_setup(c), static_cast<std::size_t>(c.n_coeffs));
  std::vector<double> y = data.y;
  return run_chain(
      parse_algorithm(c.algorithm), deconv_prior(c),
      [forward, y](std::span<const double> u) { return forward->potential(u, y); },
      chain_config(c, stream_id));
}

namespace {

SweepPoint summarize_sweep(const std::vector<ChainRecord>& chains, std::string parameter,
                           double value, const ExperimentConfig& c, std::size_t max_lag) {
  SweepPoint pt;
  pt.parameter = std::move(parameter);
  pt.value = value;
  pt.algorithm = c.algorithm;
  pt.n_coeffs = c.n_coeffs;
  pt.beta = c.beta;
  for (const ChainRecord& ch : chains) {
    pt.acceptance.push_back(ch.acceptance_rate().value_or(std::nan("")));
    if (ch.n_samples() > 1) {
      const DiagnosticsReport d = diagnose(ch, std::min<std::size_t>(max_lag, ch.n_samples() - 1));
      pt.min_ess += d.min_ess;
      pt.mean_ess += d.mean_ess;
      pt.max_ess += d.max_ess;
    }
  }
  const double n = static_cast<double>(chains.size());
  pt.mean_acceptance = std::accumulate(pt.acceptance.begin(), pt.acceptance.end(), 0.0) / n;
  pt.min_ess /= n;
  pt.mean_ess /= n;
  pt.max_ess /= n;
  return pt;
}

}  // namespace

std::vector<SweepPoint> denoise_beta_sweep(const ExperimentConfig& config,
                                           std::span<const std::int64_t> sizes,
                                           std::span<const double> betas) {
  std::vector<std::string> algorithms;
  if (config.algorithm == "both") {
    algorithms = {"rcar", "sarsd"};
  } else {
    algorithms = {config.algorithm};
  }
  std::vector<SweepPoint> out;
  for (const std::string& alg : algorithms) {
    for (std::int64_t n : sizes) {
      const std::vector<double> y = denoise_data(config.seed, static_cast<std::size_t>(n));
      for (double beta : betas) {
        ExperimentConfig c = config;
        c.algorithm = alg;
        c.n_coeffs = n;
        c.beta = beta;
        validate(c);
        auto chains = run_restarts([&](std::uint64_t s) { return denoise_chain(c, y, s); },
                                   c.restarts);
        out.push_back(summarize_sweep(chains, "beta", beta, c, static_cast<std::size_t>(c.max_lag)));
      }
    }
  }
  return out;
}

std::vector<SweepPoint> deconv_sweep(const ExperimentConfig& config, const std::string& parameter,
                                     std::span<const double> values) {
  std::vector<SweepPoint> out;
  const DeconvData shared = parameter == "eps" ? DeconvData{} : deconv_data(config);
  for (double v : values) {
    ExperimentConfig c = config;
    if (parameter == "N") {
      c.n_coeffs = static_cast<std::int64_t>(std::llround(v));
    } else if (parameter == "p") {
      c.p = v;
    } else if (parameter == "lambda") {
      c.lambda = v;
    } else if (parameter == "eps") {
      c.eps = v;
    } else {
      throw ConfigError("sweep: unknown deconvolution sweep '" + parameter + "'");
    }
    c.sweep = "none";
    validate(c);
    const DeconvData data = parameter == "eps" ? deconv_data(c) : shared;
    auto chains = run_restarts([&](std::uint64_t s) { return deconv_chain(c, data, s); },
                               c.restarts);
    out.push_back(summarize_sweep(chains, parameter, v, c, static_cast<std::size_t>(c.max_lag)));
  }
  return out;
}

namespace {

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { ensure_directory(dir_); }

  fs::path path(const std::string& name) {
    artifacts_.push_back(name);
    return dir_ / name;
  }

  const std::vector<std::string>& artifacts() const { return artifacts_; }

 private:
  fs::path dir_;
  std::vector<std::string> artifacts_;
};

void write_chains(ArtifactWriter& w, const std::vector<ChainRecord>& chains) {
  for (std::size_t r = 0; r < chains.size(); ++r) {
    const std::string stem = r == 0 ? "chain" : "chain_r" + std::to_string(r);
    write_chain_csv(w.path(stem + ".csv"), chains[r]);
    write_json(w.path(stem + ".json"), chain_json(chains[r]));
  }
}

nlohmann::json acceptance_json(const std::vector<ChainRecord>& chains) {
  nlohmann::json per = nlohmann::json::array();
  double sum = 0.0;
  for (const ChainRecord& c : chains) {
    const auto a = c.acceptance_rate();
    per.push_back(a ? nlohmann::json(*a) : nlohmann::json(nullptr));
    sum += a.value_or(0.0);
  }
  return {{"per_restart", per}, {"mean", sum / static_cast<double>(chains.size())}};
}

void write_diagnostics(ArtifactWriter& w, const ChainRecord& chain, std::int64_t max_lag,
                       nlohmann::json& summary) {
  if (chain.n_samples() < 2) {
    summary["diagnostics"] = nullptr;
    return;
  }
  const std::size_t lag = std::min<std::size_t>(static_cast<std::size_t>(max_lag), chain.n_samples() - 1);
  const DiagnosticsReport report = diagnose(chain, lag);
  const nlohmann::json dj = diagnostics_json(report);
  write_json(w.path("diagnostics.json"), dj);
  write_acf_csv(w.path("acf.csv"), report);
  summary["diagnostics"] = {{"min_ess", dj["min_ess"]}, {"mean_ess", dj["mean_ess"]},
                            {"max_ess", dj["max_ess"]}, {"max_iacf", dj["max_iacf"]}};
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepPoint>& points) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  std::size_t restarts = 0;
  for (const auto& p : points) restarts = std::max(restarts, p.acceptance.size());
  out << "parameter,value,algorithm,N,beta,mean_acceptance";
  for (std::size_t r = 0; r < restarts; ++r) out << ",acceptance_r" << r;
  out << ",min_ess,mean_ess,max_ess\n";
  for (const auto& p : points) {
    out << p.parameter << ',' << format_double(p.value) << ',' << p.algorithm << ',' << p.n_coeffs
        << ',' << format_double(p.beta) << ',' << format_double(p.mean_acceptance);
    for (std::size_t r = 0; r < restarts; ++r) {
      out << ',' << (r < p.acceptance.size() ? format_double(p.acceptance[r]) : "");
    }
    out << ',' << format_double(p.min_ess) << ',' << format_double(p.mean_ess) << ','
        << format_double(p.max_ess) << '\n';
  }
  if (!out) throw IoError("write to " + path.string() + " failed");
}

nlohmann::json sweep_json(const std::vector<SweepPoint>& points) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : points) {
    arr.push_back({{"parameter", p.parameter},
                   {"value", p.value},
                   {"algorithm", p.algorithm},
                   {"N", p.n_coeffs},
                   {"beta", p.beta},
                   {"acceptance", p.acceptance},
                   {"mean_acceptance", p.mean_acceptance},
                   {"min_ess", p.min_ess},
                   {"mean_ess", p.mean_ess},
                   {"max_ess", p.max_ess}});
  }
  return arr;
}

void run_density2d(const ExperimentConfig& c, ArtifactWriter& w, nlohmann::json& summary) {
  auto chains = run_restarts([&](std::uint64_t s) { return density2d_chain(c, s); }, c.restarts);
  write_chains(w, chains);
  summary["acceptance"] = acceptance_json(chains);
  const ChainRecord& chain = chains.front();
  write_diagnostics(w, chain, c.max_lag, summary);

  const GridSpec2d grid;
  if (chain.n_samples() > 0) {
    const Histogram2d h = hist2d(chain.component(0), chain.component(1), 120, 120, grid.lo,
                                 grid.hi, grid.lo, grid.hi);
    std::vector<std::vector<double>> rows;
    rows.reserve(h.nx * h.ny);
    const double dx = (h.x_hi - h.x_lo) / static_cast<double>(h.nx);
    const double dy = (h.y_hi - h.y_lo) / static_cast<double>(h.ny);
    for (std::size_t i = 0; i < h.nx; ++i) {
      for (std::size_t j = 0; j < h.ny; ++j) {
        rows.push_back({h.x_lo + (static_cast<double>(i) + 0.5) * dx,
                        h.y_lo + (static_cast<double>(j) + 0.5) * dy,
                        static_cast<double>(h.counts[i * h.ny + j])});
      }
    }
    write_table_csv(w.path("hist2d.csv"), {"u_0", "u_1", "count"}, rows);
    summary["hist2d_outside"] = h.outside;
  }

  const GridPosterior2D post = analytic_posterior_2d(c.p, grid);
  const std::size_t n = post.axis.size();
  std::vector<std::vector<double>> rows;
  rows.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) rows.push_back({post.axis[i], post.axis[j], post.density[i * n + j]});
  }
  write_table_csv(w.path("analytic_posterior.csv"), {"u_0", "u_1", "density"}, rows);

  nlohmann::json moments;
  moments["analytic_mean"] = {post.mean[0], post.mean[1]};
  moments["analytic_cov"] = {{post.cov[0][0], post.cov[0][1]}, {post.cov[1][0], post.cov[1][1]}};
  if (chain.n_samples() > 0) {
    const auto s = summarize(chain);
    moments["mcmc_mean"] = {s[0].mean, s[1].mean};
    moments["mcmc_std"] = {s[0].std, s[1].std};
  }
  summary["moments"] = moments;
}

void run_denoise(const ExperimentConfig& c, ArtifactWriter& w, nlohmann::json& summary) {
  if (c.sweep == "beta") {
    const std::vector<double> betas =
        c.sweep_values.empty() ? default_sweep_values("denoise", "beta") : c.sweep_values;
    const std::vector<std::int64_t> sizes =
        c.sizes.empty() ? std::vector<std::int64_t>{10, 20, 40} : c.sizes;
    const auto points = denoise_beta_sweep(c, sizes, betas);
    write_sweep_csv(w.path("sweep.csv"), points);
    summary["sweep"] = sweep_json(points);
    return;
  }
  const auto n = static_cast<std::size_t>(c.n_coeffs);
  const std::vector<double> y = denoise_data(c.seed, n);
  const std::vector<double> truth = denoising_truth(n);
  {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back({static_cast<double>(i), truth[i], y[i]});
    write_table_csv(w.path("data.csv"), {"index", "truth", "y"}, rows);
  }
  auto chains = run_restarts([&](std::uint64_t s) { return denoise_chain(c, y, s); }, c.restarts);
  write_chains(w, chains);
  summary["acceptance"] = acceptance_json(chains);
  const ChainRecord& chain = chains.front();
  write_diagnostics(w, chain, c.max_lag, summary);
  if (chain.n_samples() > 0) {
    const auto s = summarize(chain);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
      rows.push_back({static_cast<double>(i), truth[i], y[i], s[i].mean, s[i].median, s[i].std});
    }
    write_table_csv(w.path("estimates.csv"), {"index", "truth", "y", "mean", "median", "std"}, rows);
  }
}

void run_deconvolve(const ExperimentConfig& c, ArtifactWriter& w, nlohmann::json& summary) {
  if (c.sweep != "none") {
    const std::vector<double> values =
        c.sweep_values.empty() ? default_sweep_values("deconvolve", c.sweep) : c.sweep_values;
    const auto points = deconv_sweep(c, c.sweep, values);
    write_sweep_csv(w.path("sweep.csv"), points);
    summary["sweep"] = sweep_json(points);
    return;
  }
  const DeconvSetup setup = deconv_setup(c);
  const DeconvData data = deconv_data(c);
  {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < data.y.size(); ++i) rows.push_back({data.points[i], data.clean[i], data.y[i]});
    write_table_csv(w.path("data.csv"), {"t", "clean", "y"}, rows);
    write_json(w.path("data.json"),
               {{"seed", c.seed},
                {"stream_id", kDataStream},
                {"eps", setup.eps},
                {"noise_std", setup.noise_std},
                {"data_grid", setup.data_grid},
                {"solver_grid", setup.solver_grid},
                {"observation_points", "linspace(0.01, 0.99, 20), endpoints included"},
                {"source", c.data_path.empty() ? "generated" : c.data_path}});
  }
  auto chains = run_restarts([&](std::uint64_t s) { return deconv_chain(c, data, s); }, c.restarts);
  write_chains(w, chains);
  summary["acceptance"] = acceptance_json(chains);
  const ChainRecord& chain = chains.front();
  write_diagnostics(w, chain, c.max_lag, summary);
  if (chain.n_samples() == 0) return;

  const std::size_t n = chain.dim;
  const auto s = summarize(chain);
  const std::vector<double> truth = deconv_truth_grid(setup.solver_grid);
  const std::vector<double> truth_coeffs = haar_analyze(truth);
  const PriorSpec prior = deconv_prior(c);
  {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < n; ++k) {
      rows.push_back({static_cast<double>(k), prior.gamma[k], truth_coeffs[k], s[k].mean, s[k].std});
    }
    write_table_csv(w.path("modes.csv"), {"k", "gamma", "truth", "mean", "std"}, rows);
  }
  const std::size_t g = setup.solver_grid;
  std::vector<double> mean(g, 0.0);
  std::vector<double> sq(g, 0.0);
  for (std::size_t i = 0; i < chain.n_samples(); ++i) {
    const std::vector<double> f = haar_synthesize(chain.row(i), g);
    for (std::size_t j = 0; j < g; ++j) {
      mean[j] += f[j];
      sq[j] += f[j] * f[j];
    }
  }
  const double m = static_cast<double>(chain.n_samples());
  const std::vector<double> t = midpoint_grid(g);
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < g; ++j) {
    const double mu = mean[j] / m;
    rows.push_back({t[j], truth[j], mu, std::sqrt(std::max(0.0, sq[j] / m - mu * mu))});
  }
  write_table_csv(w.path("posterior_grid.csv"), {"t", "truth", "mean", "std"}, rows);
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  ArtifactWriter w(config.output_dir);
  nlohmann::json summary;
  summary["experiment"] = config.experiment;
  if (config.experiment == "density2d") {
    run_density2d(config, w, summary);
  } else if (config.experiment == "denoise") {
    run_denoise(config, w, summary);
  } else {
    run_deconvolve(config, w, summary);
  }
  write_json(w.path("summary.json"), summary);
  write_text(w.path("run.ini"), to_ini(config));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<std::uint64_t> streams(static_cast<std::size_t>(config.restarts));
  std::iota(streams.begin(), streams.end(), 0);
  nlohmann::json manifest = {{"version", library_version()},
                             {"experiment", config.experiment},
                             {"config", to_json(config)},
                             {"seeds", {{"seed", config.seed},
                                        {"chain_streams", streams},
                                        {"data_stream", kDataStream}}},
                             {"wall_time_seconds", wall}};
  std::vector<std::string> artifacts = w.artifacts();
  artifacts.push_back("manifest.json");
  manifest["artifacts"] = artifacts;
  write_json(fs::path(config.output_dir) / "manifest.json", manifest);
  return {summary, artifacts};
}

RunSummary run_diagnose(const std::string& chain_csv, const std::string& output_dir,
                        std::int64_t max_lag) {
  if (max_lag < 0) throw ConfigError("max-lag: must be nonnegative");
  const ChainCsv csv = read_chain_csv(chain_csv);
  if (csv.n_rows() < 2) throw ConfigError("chain file has fewer than two samples");
  ArtifactWriter w(output_dir);
  const std::size_t lag = std::min<std::size_t>(static_cast<std::size_t>(max_lag), csv.n_rows() - 1);
  DiagnosticsReport report = diagnose_columns(csv.data, lag);
  const double accepted = std::accumulate(csv.accept.begin(), csv.accept.end(), 0.0);
  report.acceptance_rate = accepted / static_cast<double>(csv.n_rows());
  nlohmann::json dj = diagnostics_json(report);
  dj["source"] = chain_csv;
  dj["note"] = "acceptance is the fraction of stored rows produced by an accepted step";
  write_json(w.path("diagnostics.json"), dj);
  write_acf_csv(w.path("acf.csv"), report);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < csv.data.size(); ++k) {
    const ComponentSummary s = summarize_series(csv.data[k]);
    rows.push_back({static_cast<double>(k), s.mean, s.median, s.std, report.iacf[k],
                    report.ess_per_10k[k]});
  }
  write_table_csv(w.path("summary.csv"), {"component", "mean", "median", "std", "iacf", "ess_per_10k"},
                  rows);
  return {dj, w.artifacts()};
}

}  // namespace bkmcmc
