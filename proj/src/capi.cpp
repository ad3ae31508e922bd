#include <bkmcmc/bkmcmc.h>

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "bessel_k.hpp"
#include "chain_io.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "mh.hpp"
#include "rng.hpp"
#include "verify.hpp"

struct bkm_rng {
  bkmcmc::RngHandle handle;
};

struct bkm_chain {
  bkmcmc::ChainRecord record;
};

struct bkm_report {
  std::string json;
};

namespace {

thread_local std::string g_last_error;

bkm_status fail(bkm_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs f, translating library exceptions into status codes.
template <class F>
bkm_status guarded(F&& f) {
  try {
    return f();
  } catch (const bkmcmc::DomainError& e) {
    return fail(BKM_ERR_DOMAIN, e.what());
  } catch (const bkmcmc::ShapeError& e) {
    return fail(BKM_ERR_SHAPE, e.what());
  } catch (const bkmcmc::ConfigError& e) {
    return fail(BKM_ERR_CONFIG, e.what());
  } catch (const bkmcmc::SingularPointError& e) {
    return fail(BKM_ERR_SINGULAR, e.what());
  } catch (const bkmcmc::NumericError& e) {
    return fail(BKM_ERR_NUMERIC, e.what());
  } catch (const bkmcmc::IoError& e) {
    return fail(BKM_ERR_IO, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(BKM_ERR_CONFIG, std::string("config: ") + e.what());
  } catch (const std::exception& e) {
    return fail(BKM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BKM_ERR_INTERNAL, "unknown error");
  }
}

#define BKM_REQUIRE(ptr)                                              \
  do {                                                                \
    if ((ptr) == nullptr) return fail(BKM_ERR_NULL_ARGUMENT, #ptr " is null"); \
  } while (0)

bkm_status emit(const nlohmann::json& j, bkm_report** out) {
  *out = new bkm_report{j.dump(2)};
  return BKM_OK;
}

bkmcmc::ExperimentConfig parse_config(const char* text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object() || !j.contains("experiment")) {
    throw bkmcmc::ConfigError("config: an object with an 'experiment' field is required");
  }
  return bkmcmc::config_from_json(j);
}

}  // namespace

extern "C" {

const char* bkm_version(void) {
  static const std::string v = bkmcmc::library_version();
  return v.c_str();
}

const char* bkm_last_error(void) { return g_last_error.c_str(); }

const char* bkm_status_name(bkm_status status) {
  switch (status) {
    case BKM_OK: return "ok";
    case BKM_ERR_NULL_ARGUMENT: return "null argument";
    case BKM_ERR_DOMAIN: return "domain error";
    case BKM_ERR_SHAPE: return "shape error";
    case BKM_ERR_CONFIG: return "configuration error";
    case BKM_ERR_SINGULAR: return "singular point";
    case BKM_ERR_NUMERIC: return "numeric error";
    case BKM_ERR_IO: return "i/o error";
    case BKM_ERR_VERIFICATION: return "verification failed";
    case BKM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

bkm_status bkm_rng_create(uint64_t seed, uint64_t stream_id, bkm_rng** out) {
  BKM_REQUIRE(out);
  return guarded([&] {
    *out = new bkm_rng{bkmcmc::RngHandle(seed, stream_id)};
    return BKM_OK;
  });
}

void bkm_rng_destroy(bkm_rng* rng) { delete rng; }

bkm_status bkm_rng_uniform(bkm_rng* rng, double* out) {
  BKM_REQUIRE(rng);
  BKM_REQUIRE(out);
  *out = rng->handle.uniform01();
  return BKM_OK;
}

bkm_status bkm_sample_gamma(bkm_rng* rng, double shape, double scale, double* out) {
  BKM_REQUIRE(rng);
  BKM_REQUIRE(out);
  return guarded([&] {
    *out = bkmcmc::sample_gamma(shape, scale, rng->handle);
    return BKM_OK;
  });
}

bkm_status bkm_sample_bk(bkm_rng* rng, double shape, double scale, double* out) {
  BKM_REQUIRE(rng);
  BKM_REQUIRE(out);
  return guarded([&] {
    *out = bkmcmc::sample_bk(bkmcmc::BKParams(shape, scale), rng->handle);
    return BKM_OK;
  });
}

bkm_status bkm_bessel_k(double nu, double x, double* out) {
  BKM_REQUIRE(out);
  return guarded([&] {
    *out = bkmcmc::bessel_k_nu(nu, x);
    return BKM_OK;
  });
}

bkm_status bkm_bk_density(double shape, double scale, double t, double* out) {
  BKM_REQUIRE(out);
  return guarded([&] {
    *out = bkmcmc::bk_density(bkmcmc::BKParams(shape, scale), t);
    return BKM_OK;
  });
}

bkm_status bkm_run_lifted(bkm_algorithm algorithm, const bkm_prior* prior,
                          bkm_potential_fn potential, void* user,
                          const bkm_chain_config* config, bkm_chain** out) {
  BKM_REQUIRE(prior);
  BKM_REQUIRE(potential);
  BKM_REQUIRE(config);
  BKM_REQUIRE(out);
  if (prior->n_coeffs > 0 && prior->gamma == nullptr) return fail(BKM_ERR_NULL_ARGUMENT, "prior->gamma is null");
  if (algorithm != BKM_RCAR && algorithm != BKM_SARSD) return fail(BKM_ERR_CONFIG, "algorithm: unknown value");
  if (prior->kind != BKM_PRIOR_BESSEL_K && prior->kind != BKM_PRIOR_GAMMA) {
    return fail(BKM_ERR_CONFIG, "prior kind: unknown value");
  }
  return guarded([&] {
    bkmcmc::PriorSpec spec;
    spec.kind = prior->kind == BKM_PRIOR_GAMMA ? bkmcmc::PriorKind::Gamma : bkmcmc::PriorKind::BesselK;
    spec.shape = prior->shape;
    spec.gamma.assign(prior->gamma, prior->gamma + prior->n_coeffs);
    spec.lambda = prior->lambda;
    bkmcmc::ChainConfig cc;
    cc.n_steps = config->n_steps;
    cc.burnin = config->burnin;
    cc.thin = config->thin;
    cc.beta = config->beta;
    cc.seed = config->seed;
    cc.stream_id = config->stream_id;
    const bkmcmc::Potential psi = [potential, user](std::span<const double> u) {
      double value = 0.0;
      if (potential(u.data(), u.size(), user, &value) != 0) {
        throw bkmcmc::NumericError("potential callback reported failure");
      }
      return value;
    };
    auto chain = std::make_unique<bkm_chain>();
    chain->record = bkmcmc::run_chain(
        algorithm == BKM_RCAR ? bkmcmc::Algorithm::Rcar : bkmcmc::Algorithm::Sarsd, spec, psi, cc);
    *out = chain.release();
    return BKM_OK;
  });
}

void bkm_chain_destroy(bkm_chain* chain) { delete chain; }

bkm_status bkm_chain_shape(const bkm_chain* chain, size_t* n_samples, size_t* dim) {
  BKM_REQUIRE(chain);
  if (n_samples) *n_samples = chain->record.n_samples();
  if (dim) *dim = chain->record.dim;
  return BKM_OK;
}

bkm_status bkm_chain_samples(const bkm_chain* chain, const double** data) {
  BKM_REQUIRE(chain);
  BKM_REQUIRE(data);
  *data = chain->record.samples.data();
  return BKM_OK;
}

bkm_status bkm_chain_acceptance(const bkm_chain* chain, double* rate, int* defined) {
  BKM_REQUIRE(chain);
  BKM_REQUIRE(rate);
  const auto a = chain->record.acceptance_rate();
  *rate = a.value_or(0.0);
  if (defined) *defined = a.has_value() ? 1 : 0;
  return BKM_OK;
}

bkm_status bkm_chain_write_csv(const bkm_chain* chain, const char* path) {
  BKM_REQUIRE(chain);
  BKM_REQUIRE(path);
  return guarded([&] {
    bkmcmc::write_chain_csv(path, chain->record);
    return BKM_OK;
  });
}

void bkm_report_destroy(bkm_report* report) { delete report; }

bkm_status bkm_report_json(const bkm_report* report, const char** json) {
  BKM_REQUIRE(report);
  BKM_REQUIRE(json);
  *json = report->json.c_str();
  return BKM_OK;
}

bkm_status bkm_default_config(const char* experiment, const char* sweep, bkm_report** out) {
  BKM_REQUIRE(experiment);
  BKM_REQUIRE(out);
  return guarded([&] {
    const std::string s = sweep == nullptr ? "none" : sweep;
    return emit(bkmcmc::to_json(bkmcmc::default_experiment(experiment, s)), out);
  });
}

bkm_status bkm_config_from_manifest(const char* manifest_path, bkm_report** out) {
  BKM_REQUIRE(manifest_path);
  BKM_REQUIRE(out);
  return guarded([&] {
    std::ifstream in(manifest_path);
    if (!in) throw bkmcmc::IoError(std::string("cannot open manifest ") + manifest_path);
    const nlohmann::json m = nlohmann::json::parse(in);
    if (!m.contains("config")) throw bkmcmc::ConfigError("manifest has no 'config' object");
    return emit(bkmcmc::to_json(bkmcmc::config_from_json(m.at("config"))), out);
  });
}

bkm_status bkm_validate_config(const char* config_json) {
  BKM_REQUIRE(config_json);
  return guarded([&] {
    bkmcmc::validate(parse_config(config_json));
    return BKM_OK;
  });
}

bkm_status bkm_run_experiment(const char* config_json, bkm_report** out) {
  BKM_REQUIRE(config_json);
  BKM_REQUIRE(out);
  return guarded([&] {
    const bkmcmc::RunSummary r = bkmcmc::run_experiment(parse_config(config_json));
    nlohmann::json j = r.summary;
    j["artifacts"] = r.artifacts;
    return emit(j, out);
  });
}

bkm_status bkm_diagnose_csv(const char* chain_csv, const char* output_dir, int64_t max_lag,
                            bkm_report** out) {
  BKM_REQUIRE(chain_csv);
  BKM_REQUIRE(output_dir);
  BKM_REQUIRE(out);
  return guarded([&] {
    const bkmcmc::RunSummary r = bkmcmc::run_diagnose(chain_csv, output_dir, max_lag);
    nlohmann::json j = r.summary;
    j["artifacts"] = r.artifacts;
    return emit(j, out);
  });
}

bkm_status bkm_verify(uint64_t seed, const char* suites, double scale, int inject_fault,
                      bkm_report** out) {
  BKM_REQUIRE(out);
  return guarded([&] {
    bkmcmc::VerifyOptions opt;
    opt.seed = seed;
    opt.scale = scale;
    opt.inject_fault = inject_fault != 0;
    if (suites != nullptr) {
      std::stringstream ss(suites);
      std::string name;
      while (std::getline(ss, name, ',')) {
        if (!name.empty()) opt.suites.push_back(name);
      }
    }
    const bkmcmc::VerifyReport report = bkmcmc::run_verify(opt);
    emit(bkmcmc::to_json(report), out);
    if (!report.passed) {
      std::string names;
      for (const auto& s : report.failed_suites()) names += (names.empty() ? "" : ", ") + s;
      return fail(BKM_ERR_VERIFICATION, "failed suites: " + names);
    }
    return BKM_OK;
  });
}

}  // extern "C"
