#ifndef BKMCMC_BKMCMC_H
#define BKMCMC_BKMCMC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define BKM_API __attribute__((visibility("default")))
#else
#define BKM_API
#endif

/* Every fallible call returns a status. On failure a message describing the
   error is available from bkm_last_error() on the calling thread until the
   next failing call on that thread. */
typedef enum bkm_status {
  BKM_OK = 0,
  BKM_ERR_NULL_ARGUMENT = 1,
  BKM_ERR_DOMAIN = 2,       /* parameter outside its mathematical domain */
  BKM_ERR_SHAPE = 3,        /* mismatched lengths */
  BKM_ERR_CONFIG = 4,       /* invalid run configuration */
  BKM_ERR_SINGULAR = 5,     /* density evaluated at its singular point */
  BKM_ERR_NUMERIC = 6,      /* NaN or failing potential */
  BKM_ERR_IO = 7,
  BKM_ERR_VERIFICATION = 8, /* verify ran, at least one check failed */
  BKM_ERR_INTERNAL = 9
} bkm_status;

BKM_API const char* bkm_version(void);
BKM_API const char* bkm_last_error(void);
BKM_API const char* bkm_status_name(bkm_status status);

/* ---- random numbers and scalar laws ---- */

typedef struct bkm_rng bkm_rng;

BKM_API bkm_status bkm_rng_create(uint64_t seed, uint64_t stream_id, bkm_rng** out);
BKM_API void bkm_rng_destroy(bkm_rng* rng);
BKM_API bkm_status bkm_rng_uniform(bkm_rng* rng, double* out);
BKM_API bkm_status bkm_sample_gamma(bkm_rng* rng, double shape, double scale, double* out);
BKM_API bkm_status bkm_sample_bk(bkm_rng* rng, double shape, double scale, double* out);

BKM_API bkm_status bkm_bessel_k(double nu, double x, double* out);
BKM_API bkm_status bkm_bk_density(double shape, double scale, double t, double* out);

/* ---- lifted samplers ---- */

typedef enum bkm_algorithm { BKM_RCAR = 0, BKM_SARSD = 1 } bkm_algorithm;
typedef enum bkm_prior_kind { BKM_PRIOR_BESSEL_K = 0, BKM_PRIOR_GAMMA = 1 } bkm_prior_kind;

/* u_l = lambda * gamma[l] * eta_l with eta_l i.i.d. BK(shape, 1) or Gamm(shape, 1). */
typedef struct bkm_prior {
  bkm_prior_kind kind;
  double shape;
  const double* gamma;
  size_t n_coeffs;
  double lambda;
} bkm_prior;

typedef struct bkm_chain_config {
  int64_t n_steps;
  int64_t burnin;
  int64_t thin;
  double beta;
  uint64_t seed;
  uint64_t stream_id;
} bkm_chain_config;

/* Writes the potential at u (length n) to *out and returns 0; any other
   return value aborts the chain with BKM_ERR_NUMERIC. */
typedef int (*bkm_potential_fn)(const double* u, size_t n, void* user, double* out);

typedef struct bkm_chain bkm_chain;

BKM_API bkm_status bkm_run_lifted(bkm_algorithm algorithm, const bkm_prior* prior,
                                  bkm_potential_fn potential, void* user,
                                  const bkm_chain_config* config, bkm_chain** out);
BKM_API void bkm_chain_destroy(bkm_chain* chain);
BKM_API bkm_status bkm_chain_shape(const bkm_chain* chain, size_t* n_samples, size_t* dim);
/* Row-major samples, valid until the chain is destroyed. */
BKM_API bkm_status bkm_chain_samples(const bkm_chain* chain, const double** data);
/* *defined is 0 when the chain has no post-burn-in steps. */
BKM_API bkm_status bkm_chain_acceptance(const bkm_chain* chain, double* rate, int* defined);
BKM_API bkm_status bkm_chain_write_csv(const bkm_chain* chain, const char* path);

/* ---- experiments, diagnostics, verification ----
   Results come back as a report handle holding a JSON document. */

typedef struct bkm_report bkm_report;

BKM_API void bkm_report_destroy(bkm_report* report);
/* NUL-terminated JSON text, valid until the report is destroyed. */
BKM_API bkm_status bkm_report_json(const bkm_report* report, const char** json);

/* Default configuration object for "density2d", "denoise" or "deconvolve".
   sweep may be NULL or "none"; a sweep name selects the sweep run lengths. */
BKM_API bkm_status bkm_default_config(const char* experiment, const char* sweep, bkm_report** out);
/* Configuration recorded in an artifact directory's manifest.json. */
BKM_API bkm_status bkm_config_from_manifest(const char* manifest_path, bkm_report** out);
/* Validates without running; fields missing from config_json take the
   experiment defaults. */
BKM_API bkm_status bkm_validate_config(const char* config_json);
BKM_API bkm_status bkm_run_experiment(const char* config_json, bkm_report** out);
BKM_API bkm_status bkm_diagnose_csv(const char* chain_csv, const char* output_dir, int64_t max_lag,
                                    bkm_report** out);

/* suites: comma-separated names, NULL or "" for all. On failing checks the
   report is still produced and BKM_ERR_VERIFICATION is returned. */
BKM_API bkm_status bkm_verify(uint64_t seed, const char* suites, double scale, int inject_fault,
                              bkm_report** out);

#ifdef __cplusplus
}
#endif

#endif
