#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chain_io.hpp"
#include "error.hpp"
#include "experiments.hpp"

using namespace bkmcmc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("bkmcmc_exp_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small(const std::string& experiment, const fs::path& out) {
  auto c = default_experiment(experiment);
  c.n_steps = 3000;
  c.burnin = 500;
  c.thin = 1;
  c.max_lag = 50;
  c.output_dir = out.string();
  return c;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("defaults follow the experiment protocols") {
  const auto d = default_experiment("density2d");
  CHECK(d.p == 1.0);
  CHECK(d.beta == 0.3);
  CHECK(d.n_steps == 800000);
  CHECK(d.burnin == 10000);
  CHECK(d.n_coeffs == 2);

  const auto dn = default_experiment("denoise");
  CHECK(dn.beta == 0.9);
  CHECK(dn.n_coeffs == 10);

  const auto dc = default_experiment("deconvolve");
  CHECK(dc.p == doctest::Approx(2.0 / 3.0));
  CHECK(dc.beta == 0.97);
  CHECK(dc.n_coeffs == 32);
  CHECK(dc.eps == 1.0 / 16.0);

  CHECK(default_experiment("deconvolve", "p").restarts == 5);
  CHECK(default_experiment("denoise", "beta").restarts == 5);
  CHECK(default_sweep_values("deconvolve", "lambda") == std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0});
  CHECK(default_sweep_values("deconvolve", "N") == std::vector<double>{8, 16, 32, 64, 128});

  CHECK_THROWS_AS(default_experiment("denoise", "p"), ConfigError);
  CHECK_THROWS_AS(default_experiment("density2d", "beta"), ConfigError);
  CHECK_THROWS_AS(default_experiment("nope"), ConfigError);
}

TEST_CASE("validation names the offending field") {
  auto field_of = [](const ExperimentConfig& c) {
    try {
      validate(c);
    } catch (const ConfigError& e) {
      const std::string m = e.what();
      return m.substr(0, m.find(':'));
    }
    return std::string("ok");
  };
  auto c = default_experiment("deconvolve");
  CHECK(field_of(c) == "ok");
  c.algorithm = "sarsd";
  CHECK(field_of(c) == "p");
  c = default_experiment("deconvolve");
  c.beta = 1.0;
  CHECK(field_of(c) == "beta");
  c = default_experiment("deconvolve");
  c.n_coeffs = 256;
  CHECK(field_of(c) == "N");
  c = default_experiment("density2d");
  c.n_coeffs = 3;
  CHECK(field_of(c) == "N");
  c = default_experiment("denoise");
  c.algorithm = "both";
  CHECK(field_of(c) == "algorithm");
  c.sweep = "beta";
  CHECK(field_of(c) == "ok");
  c = default_experiment("deconvolve");
  c.eps = 0.5;
  CHECK(field_of(c) == "eps");
  c = default_experiment("deconvolve");
  c.burnin = c.n_steps + 1;
  CHECK(field_of(c) == "burnin");
  c = default_experiment("deconvolve", "eps");
  c.sweep_values = {1.0 / 16.0, 0.3};
  CHECK(field_of(c) == "sweep-values");
  CHECK_THROWS_AS(parse_algorithm("mala"), ConfigError);
}

TEST_CASE("json round trip") {
  auto c = default_experiment("deconvolve", "lambda");
  c.sweep_values = {0.5, 2.0};
  c.seed = 99;
  c.output_dir = "somewhere";
  const auto back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_from_json(nlohmann::json{{"config", to_json(c)}}).seed == 99);

  // missing fields take the experiment defaults
  const auto partial = config_from_json(nlohmann::json{{"experiment", "denoise"}, {"beta", 0.95}});
  CHECK(partial.beta == 0.95);
  CHECK(partial.n_coeffs == 10);
  CHECK_THROWS(config_from_json(nlohmann::json{{"experiment", "denoise"}, {"beta", "high"}}));
}

TEST_CASE("ini text lists every setting") {
  auto c = default_experiment("denoise");
  c.output_dir = "out dir";
  const auto ini = to_ini(c);
  for (const char* key : {"algorithm=", "p=", "beta=", "N=", "n-steps=", "burnin=", "thin=", "seed=", "output-dir="})
    CHECK(ini.find(key) != std::string::npos);
}

TEST_CASE("density2d run writes its artifacts and is deterministic") {
  const auto a = scratch("d2a"), b = scratch("d2b");
  const auto ra = run_experiment(small("density2d", a));
  run_experiment(small("density2d", b));
  for (const char* f : {"chain.csv", "chain.json", "diagnostics.json", "acf.csv", "summary.json", "run.ini",
                        "manifest.json", "hist2d.csv", "analytic_posterior.csv"})
    CHECK(fs::exists(a / f));
  CHECK(slurp(a / "chain.csv") == slurp(b / "chain.csv"));
  CHECK(read_chain_csv(a / "chain.csv").n_rows() == 2500);

  const auto rate = ra.summary["acceptance"]["mean"].get<double>();
  CHECK(rate > 0.0);
  CHECK(rate < 1.0);
  CHECK(ra.summary.contains("moments"));

  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["version"] == library_version());
  CHECK(manifest["seeds"]["seed"] == 1729);
  CHECK(manifest["seeds"]["data_stream"] == kDataStream);
  CHECK(manifest.contains("wall_time_seconds"));
  CHECK(config_from_json(manifest["config"]).n_steps == 3000);
}

TEST_CASE("denoise run, sarsd, with restarts") {
  const auto dir = scratch("dn");
  auto c = small("denoise", dir);
  c.algorithm = "sarsd";
  c.restarts = 2;
  const auto r = run_experiment(c);
  CHECK(r.summary["acceptance"]["per_restart"].size() == 2);
  CHECK(fs::exists(dir / "estimates.csv"));
  CHECK(fs::exists(dir / "data.csv"));
  CHECK(fs::exists(dir / "chain_r1.csv"));
  CHECK(slurp(dir / "chain.csv") != slurp(dir / "chain_r1.csv"));
}

TEST_CASE("deconvolve run and reuse of its data file") {
  const auto a = scratch("dca"), b = scratch("dcb");
  auto c = small("deconvolve", a);
  c.n_coeffs = 8;
  c.thin = 5;
  run_experiment(c);
  for (const char* f : {"data.csv", "data.json", "modes.csv", "posterior_grid.csv"}) CHECK(fs::exists(a / f));
  CHECK(read_chain_csv(a / "chain.csv").n_rows() == 500);

  auto reuse = c;
  reuse.output_dir = b.string();
  reuse.data_path = (a / "data.csv").string();
  run_experiment(reuse);
  CHECK(slurp(a / "chain.csv") == slurp(b / "chain.csv"));

  reuse.data_path = (a / "missing.csv").string();
  CHECK_THROWS_AS(run_experiment(reuse), IoError);
}

TEST_CASE("sweeps write one row per grid value") {
  const auto dir = scratch("sw");
  auto c = default_experiment("deconvolve", "p");
  c.n_steps = 1500;
  c.burnin = 200;
  c.restarts = 2;
  c.n_coeffs = 8;
  c.sweep_values = {0.4, 1.0};
  c.output_dir = dir.string();
  const auto r = run_experiment(c);
  REQUIRE(r.summary["sweep"].size() == 2);
  CHECK(r.summary["sweep"][0]["value"] == 0.4);
  std::ifstream in(dir / "sweep.csv");
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);

  const auto pts = denoise_beta_sweep(
      [] {
        auto d = default_experiment("denoise", "beta");
        d.n_steps = 1000;
        d.burnin = 100;
        d.restarts = 2;
        d.algorithm = "both";
        return d;
      }(),
      std::vector<std::int64_t>{10}, std::vector<double>{0.5, 0.9});
  CHECK(pts.size() == 4);  // 2 algorithms x 1 size x 2 betas
  for (const auto& p : pts) CHECK(p.acceptance.size() == 2);
}

TEST_CASE("diagnose an existing chain file") {
  const auto a = scratch("dg"), out = scratch("dgo");
  run_experiment(small("density2d", a));
  const auto r = run_diagnose((a / "chain.csv").string(), out.string(), 30);
  CHECK(fs::exists(out / "diagnostics.json"));
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(fs::exists(out / "acf.csv"));
  CHECK_THROWS_AS(run_diagnose((a / "nope.csv").string(), out.string(), 30), IoError);
}

}  // TEST_SUITE
