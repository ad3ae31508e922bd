// Command-line front end. Talks to the library only through the C API.

#include <bkmcmc/bkmcmc.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitVerification = 3;

struct CliError {
  int code;
  std::string message;
};

int exit_code(bkm_status s) {
  switch (s) {
    case BKM_OK: return kExitOk;
    case BKM_ERR_NULL_ARGUMENT:
    case BKM_ERR_DOMAIN:
    case BKM_ERR_SHAPE:
    case BKM_ERR_CONFIG: return kExitConfig;
    case BKM_ERR_VERIFICATION: return kExitVerification;
    default: return kExitFailure;
  }
}

struct ReportDeleter {
  void operator()(bkm_report* r) const { bkm_report_destroy(r); }
};
using Report = std::unique_ptr<bkm_report, ReportDeleter>;

json report_json(const Report& r) {
  const char* text = nullptr;
  bkm_report_json(r.get(), &text);
  return json::parse(text);
}

void check(bkm_status s) {
  if (s != BKM_OK) throw CliError{exit_code(s), std::string(bkm_status_name(s)) + ": " + bkm_last_error()};
}

// Settings shared by the file and the command line. `field` is the key in
// the library's JSON configuration.
enum class Kind { Real, Integer, Text, RealList, IntegerList };

struct Setting {
  const char* flag;
  const char* field;
  Kind kind;
  const char* help;
};

const std::vector<Setting>& settings() {
  static const std::vector<Setting> s = {
      {"algorithm", "algorithm", Kind::Text, "rcar or sarsd (denoise beta sweep also accepts both)"},
      {"p", "p", Kind::Real, "prior shape"},
      {"beta", "beta", Kind::Real, "proposal step parameter in (0,1)"},
      {"lambda", "lambda", Kind::Real, "global prior scale"},
      {"eps", "eps", Kind::Real, "blurring kernel half width"},
      {"N", "N", Kind::Integer, "number of coefficients"},
      {"n-steps", "n_steps", Kind::Integer, "total chain steps including burn-in"},
      {"burnin", "burnin", Kind::Integer, "burn-in steps"},
      {"thin", "thin", Kind::Integer, "storage stride"},
      {"restarts", "restarts", Kind::Integer, "independent chains, one stream each"},
      {"seed", "seed", Kind::Integer, "base seed"},
      {"output-dir", "output_dir", Kind::Text, "artifact directory"},
      {"sweep", "sweep", Kind::Text, "sweep mode"},
      {"sweep-values", "sweep_values", Kind::RealList, "override the sweep grid"},
      {"sizes", "sizes", Kind::IntegerList, "dimensions of the denoise beta sweep"},
      {"max-lag", "max_lag", Kind::Integer, "largest ACF lag"},
      {"data", "data_path", Kind::Text, "reuse an existing data.csv"},
  };
  return s;
}

const Setting* find_setting(const std::string& key) {
  const std::string k = key == "n-coeffs" ? "N" : key;
  for (const auto& s : settings()) {
    if (k == s.flag || k == s.field) return &s;
  }
  return nullptr;
}

json convert(const Setting& s, const std::vector<std::string>& inputs, const std::string& origin) {
  auto bad = [&](const std::string& v) {
    return CliError{kExitConfig, std::string(s.flag) + ": cannot parse '" + v + "' (" + origin + ")"};
  };
  auto real = [&](const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &pos);
    } catch (...) {
      throw bad(v);
    }
    if (pos != v.size()) throw bad(v);
    return x;
  };
  auto integer = [&](const std::string& v) {
    std::size_t pos = 0;
    long long x = 0;
    try {
      x = std::stoll(v, &pos);
    } catch (...) {
      throw bad(v);
    }
    if (pos != v.size()) throw bad(v);
    return x;
  };
  const bool list = s.kind == Kind::RealList || s.kind == Kind::IntegerList;
  if (!list && inputs.size() != 1) {
    throw CliError{kExitConfig, std::string(s.flag) + ": expected a single value (" + origin + ")"};
  }
  switch (s.kind) {
    case Kind::Real: return real(inputs[0]);
    case Kind::Integer: {
      const long long v = integer(inputs[0]);
      if (std::string(s.field) == "seed") {
        if (v < 0) throw bad(inputs[0]);
        return static_cast<std::uint64_t>(v);
      }
      return v;
    }
    case Kind::Text: return inputs[0];
    case Kind::RealList: {
      json arr = json::array();
      for (const auto& v : inputs) arr.push_back(real(v));
      return arr;
    }
    case Kind::IntegerList: {
      json arr = json::array();
      for (const auto& v : inputs) arr.push_back(integer(v));
      return arr;
    }
  }
  return nullptr;
}

// key = value file; keys outside a section or in the [<experiment>] section apply.
std::map<std::string, json> read_ini(const std::string& path, const std::string& experiment) {
  if (!fs::exists(path)) throw CliError{kExitConfig, "config: file not found: " + path};
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::Error& e) {
    throw CliError{kExitConfig, std::string("config: ") + e.what()};
  }
  std::map<std::string, json> out;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() && item.parents.front() != experiment) continue;
    const Setting* s = find_setting(item.name);
    if (s == nullptr) throw CliError{kExitConfig, "config: unknown key '" + item.name + "' in " + path};
    out[s->field] = convert(*s, item.inputs, path);
  }
  return out;
}

struct ExperimentArgs {
  std::string config_path;
  std::string manifest_path;
  bool quiet = false;
  std::map<std::string, std::vector<std::string>> raw;  // flag -> values
  std::map<std::string, CLI::Option*> options;
};

void add_experiment_options(CLI::App* sub, ExperimentArgs& args, bool with_data) {
  sub->add_option("--config", args.config_path, "key = value settings file; flags override it");
  sub->add_option("--manifest", args.manifest_path,
                  "start from the configuration recorded in a manifest.json");
  sub->add_flag("--quiet,-q", args.quiet, "print nothing on success");
  for (const auto& s : settings()) {
    if (!with_data && std::string(s.flag) == "data") continue;
    std::string names = "--" + std::string(s.flag);
    if (std::string(s.flag) == "N") names += ",--n-coeffs";
    if (std::string(s.flag) == "output-dir") names += ",-o";
    auto& slot = args.raw[s.flag];
    CLI::Option* opt = sub->add_option(names, slot, s.help);
    if (s.kind == Kind::RealList || s.kind == Kind::IntegerList) {
      opt->delimiter(',')->allow_extra_args();
    } else {
      opt->expected(1);
    }
    args.options[s.flag] = opt;
  }
}

std::string default_output_dir(const std::string& experiment) {
  const char* env = std::getenv("BKMCMC_OUTPUT_DIR");
  const fs::path root = env != nullptr && *env != '\0' ? fs::path(env) : fs::path("bkmcmc-out");
  return (root / experiment).string();
}

// Layering, lowest to highest: experiment defaults, manifest, file, flags.
json resolve_config(const std::string& experiment, const ExperimentArgs& args) {
  json manifest;
  if (!args.manifest_path.empty()) {
    bkm_report* r = nullptr;
    check(bkm_config_from_manifest(args.manifest_path.c_str(), &r));
    manifest = report_json(Report(r));
    if (manifest.value("experiment", experiment) != experiment) {
      throw CliError{kExitConfig, "manifest: recorded experiment is '" +
                                      manifest["experiment"].get<std::string>() + "', not '" +
                                      experiment + "'"};
    }
  }
  const std::map<std::string, json> file =
      args.config_path.empty() ? std::map<std::string, json>{} : read_ini(args.config_path, experiment);
  std::map<std::string, json> flags;
  for (const auto& s : settings()) {
    auto it = args.options.find(s.flag);
    if (it == args.options.end() || it->second->count() == 0) continue;
    flags[s.field] = convert(s, args.raw.at(s.flag), "command line");
  }

  std::string sweep = "none";
  if (manifest.contains("sweep")) sweep = manifest["sweep"].get<std::string>();
  if (file.count("sweep")) sweep = file.at("sweep").get<std::string>();
  if (flags.count("sweep")) sweep = flags.at("sweep").get<std::string>();

  bkm_report* r = nullptr;
  check(bkm_default_config(experiment.c_str(), sweep.c_str(), &r));
  json config = report_json(Report(r));
  bool dir_given = false;
  for (auto& [k, v] : manifest.items()) {
    // The recorded directory is where the original run wrote; a re-run
    // goes to the default location unless told otherwise.
    if (k == "output_dir") continue;
    config[k] = v;
  }
  for (const std::map<std::string, json>* layer : {&file, static_cast<const std::map<std::string, json>*>(&flags)}) {
    for (const auto& [k, v] : *layer) {
      config[k] = v;
      if (k == "output_dir") dir_given = true;
    }
  }
  if (!dir_given) config["output_dir"] = default_output_dir(experiment);
  config["experiment"] = experiment;
  return config;
}

std::string fixed(const json& v, int digits = 4) {
  if (!v.is_number()) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v.get<double>());
  return buf;
}

void print_summary(const json& config, const json& result) {
  std::cout << config["experiment"].get<std::string>() << " (" << config["algorithm"].get<std::string>()
            << ")";
  if (result.contains("sweep")) {
    std::cout << " sweep over " << config["sweep"].get<std::string>() << "\n";
    for (const auto& pt : result["sweep"]) {
      std::cout << "  " << pt["algorithm"].get<std::string>() << " N=" << pt["N"].get<long long>()
                << " beta=" << fixed(pt["beta"], 3) << " " << pt["parameter"].get<std::string>() << "="
                << fixed(pt["value"], 4) << "  acceptance " << fixed(pt["mean_acceptance"])
                << "  min ESS/1e4 " << fixed(pt["min_ess"], 1) << "\n";
    }
  } else {
    std::cout << "\n  acceptance " << fixed(result["acceptance"]["mean"]);
    const json& per = result["acceptance"]["per_restart"];
    if (per.size() > 1) {
      std::cout << " (restarts:";
      for (const auto& a : per) std::cout << " " << fixed(a);
      std::cout << ")";
    }
    std::cout << "\n";
    if (result.contains("diagnostics") && result["diagnostics"].is_object()) {
      std::cout << "  min ESS/1e4 " << fixed(result["diagnostics"]["min_ess"], 1) << ", max IACF "
                << fixed(result["diagnostics"]["max_iacf"], 2) << "\n";
    }
  }
  std::cout << "  artifacts in " << config["output_dir"].get<std::string>() << "\n";
}

int run_experiment_cmd(const std::string& experiment, const ExperimentArgs& args) {
  const json config = resolve_config(experiment, args);
  const std::string text = config.dump();
  bkm_report* r = nullptr;
  check(bkm_run_experiment(text.c_str(), &r));
  const json result = report_json(Report(r));
  if (!args.quiet) print_summary(config, result);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Prior-reversible MCMC samplers for Bessel-K and gamma priors");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("bkmcmc ") + bkm_version());

  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"density2d", "two-dimensional linear inverse problem with a Bessel-K prior"},
      {"denoise", "denoising with a gamma product prior (use --sweep beta for acceptance curves)"},
      {"deconvolve", "Haar-wavelet deconvolution (sweeps: N, p, lambda, eps)"},
  };
  std::map<std::string, ExperimentArgs> exp_args;
  std::map<std::string, CLI::App*> exp_cmds;
  for (const auto& [name, help] : experiments) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_experiment_options(sub, exp_args[name], name == "deconvolve");
    exp_cmds[name] = sub;
  }

  CLI::App* diag = app.add_subcommand("diagnose", "ACF, IACF and ESS of an existing chain CSV");
  std::string diag_csv;
  std::string diag_out;
  long long diag_lag = 200;
  bool diag_quiet = false;
  diag->add_option("chain", diag_csv, "chain CSV written by an experiment")->required();
  diag->add_option("--output-dir,-o", diag_out, "defaults to <chain>_diagnostics next to the CSV");
  diag->add_option("--max-lag", diag_lag, "largest ACF lag");
  diag->add_flag("--quiet,-q", diag_quiet);

  CLI::App* ver = app.add_subcommand("verify", "distributional property suites");
  unsigned long long ver_seed = 20240611;
  std::vector<std::string> ver_suites;
  double ver_scale = 1.0;
  bool ver_fault = false;
  std::string ver_out;
  bool ver_quiet = false;
  ver->add_option("--seed", ver_seed, "seed of every suite");
  ver->add_option("--suite", ver_suites,
                  "suite to run (repeatable): innovations, char-fn, balance, prior, density, haar, forward")
      ->delimiter(',');
  ver->add_option("--scale", ver_scale, "sample-size multiplier");
  ver->add_flag("--inject-fault", ver_fault,
                "negative control: mismatched beta in the symmetrized kernel");
  ver->add_option("--output-dir,-o", ver_out, "write verify.json here");
  ver->add_flag("--quiet,-q", ver_quiet, "print only failing checks and the verdict");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    for (const auto& [name, sub] : exp_cmds) {
      if (sub->parsed()) return run_experiment_cmd(name, exp_args[name]);
    }
    if (diag->parsed()) {
      if (diag_out.empty()) {
        const fs::path p(diag_csv);
        diag_out = (p.parent_path() / (p.stem().string() + "_diagnostics")).string();
      }
      bkm_report* r = nullptr;
      check(bkm_diagnose_csv(diag_csv.c_str(), diag_out.c_str(), diag_lag, &r));
      const json result = report_json(Report(r));
      if (!diag_quiet) {
        std::cout << "diagnose " << diag_csv << "\n  samples " << result["n_samples"] << ", min ESS/1e4 "
                  << fixed(result["min_ess"], 1) << ", max IACF " << fixed(result["max_iacf"], 2)
                  << "\n  artifacts in " << diag_out << "\n";
      }
      return kExitOk;
    }
    if (ver->parsed()) {
      std::string suites;
      for (const auto& s : ver_suites) suites += (suites.empty() ? "" : ",") + s;
      bkm_report* r = nullptr;
      const bkm_status st = bkm_verify(ver_seed, suites.c_str(), ver_scale, ver_fault ? 1 : 0, &r);
      if (st != BKM_OK && st != BKM_ERR_VERIFICATION) check(st);
      const Report owned(r);
      const json result = report_json(owned);
      for (const auto& c : result["checks"]) {
        const bool ok = c["passed"].get<bool>();
        if (ver_quiet && ok) continue;
        std::cout << (ok ? "PASS " : "FAIL ") << c["suite"].get<std::string>() << ": "
                  << c["name"].get<std::string>() << "  value=" << c["value"].dump() << " "
                  << c["relation"].get<std::string>() << " " << c["threshold"].dump() << "\n";
      }
      if (!ver_out.empty()) {
        std::error_code ec;
        fs::create_directories(ver_out, ec);
        std::FILE* f = std::fopen((fs::path(ver_out) / "verify.json").string().c_str(), "wb");
        if (f == nullptr) throw CliError{kExitFailure, "cannot write verify.json in " + ver_out};
        const std::string text = result.dump(2) + "\n";
        std::fwrite(text.data(), 1, text.size(), f);
        std::fclose(f);
      }
      std::cout << (st == BKM_OK ? "verify: all checks passed" : "verify: FAILED (" + std::string(bkm_last_error()) + ")")
                << " in " << fixed(result["wall_seconds"], 1) << " s\n";
      return st == BKM_OK ? kExitOk : kExitVerification;
    }
  } catch (const CliError& e) {
    std::cerr << "bkmcmc: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "bkmcmc: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
