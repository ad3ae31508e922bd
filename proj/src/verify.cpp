#include "verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <set>

#include "bessel_k.hpp"
#include "error.hpp"
#include "forward.hpp"
#include "innovations.hpp"
#include "kernels.hpp"
#include "mh.hpp"
#include "priors.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "stat_tests.hpp"

namespace bkmcmc {

namespace {

constexpr double kKsLevel = 0.01;

class Suite {
 public:
  Suite(std::string name, VerifyReport& report) : name_(std::move(name)), report_(report) {}

  void at_most(const std::string& check, double value, double threshold) {
    add(check, value, threshold, "<=", value <= threshold);
  }
  void at_least(const std::string& check, double value, double threshold) {
    add(check, value, threshold, ">=", value >= threshold);
  }
  // The wrapped test must reject: value above threshold.
  void must_fail(const std::string& check, double value, double threshold) {
    add(check, value, threshold, "fails", value > threshold);
  }

 private:
  void add(const std::string& check, double value, double threshold, const char* rel, bool ok) {
    report_.checks.push_back({name_, check, value, threshold, rel, ok && std::isfinite(value)});
    if (!report_.checks.back().passed) report_.passed = false;
  }
  std::string name_;
  VerifyReport& report_;
};

std::size_t scaled(double base, double scale, std::size_t floor_n) {
  return std::max(floor_n, static_cast<std::size_t>(std::llround(base * scale)));
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

template <class F>
std::vector<double> draw(std::size_t n, RngHandle& rng, F&& f) {
  std::vector<double> out(n);
  for (auto& x : out) x = f(rng);
  return out;
}

void suite_innovations(const VerifyOptions& opt, VerifyReport& report) {
  Suite s("innovations", report);
  const std::size_t n = scaled(1e5, opt.scale, 1000);
  RngHandle rng(opt.seed, 1);
  for (double p : {0.5, 1.0, 2.0}) {
    for (double beta : {0.3, 0.7, 0.97}) {
      auto a = draw(n, rng, [&](RngHandle& r) {
        return beta * sample_gamma(p, 1.0, r) + sample_gamma_innovation(p, 1.0, beta, r);
      });
      auto b = draw(n, rng, [&](RngHandle& r) { return sample_gamma(p, 1.0, r); });
      s.at_least(fmt("gamma p=%g beta=%g", p, beta), ks_test_2samp(a, b).p_value, kKsLevel);
    }
  }
  for (double p : {0.5, 1.0, 2.0}) {
    const BKParams bk(p, 1.0);
    for (double beta : {0.3, 0.7, 0.97}) {
      auto a = draw(n, rng, [&](RngHandle& r) {
        return beta * sample_bk(bk, r) + sample_bk_innovation(p, 1.0, beta, r);
      });
      auto b = draw(n, rng, [&](RngHandle& r) { return sample_bk(bk, r); });
      s.at_least(fmt("bessel-k p=%g beta=%g", p, beta), ks_test_2samp(a, b).p_value, kKsLevel);
    }
  }
  for (double beta : {0.3, 0.7, 0.97}) {
    auto a = draw(n, rng, [&](RngHandle& r) {
      return beta * sample_exponential(1.0, r) + sample_exp_innovation(1.0, beta, r);
    });
    auto b = draw(n, rng, [&](RngHandle& r) { return sample_exponential(1.0, r); });
    s.at_least(fmt("exponential beta=%g", beta), ks_test_2samp(a, b).p_value, kKsLevel);
  }
}

void suite_char_fn(const VerifyOptions& opt, VerifyReport& report) {
  Suite s("char-fn", report);
  const std::size_t n = scaled(1e6, opt.scale, 1000);
  const double tol = 4.0 / std::sqrt(static_cast<double>(n));
  const std::vector<double> grid = cf_grid();
  RngHandle rng(opt.seed, 2);

  const std::vector<std::pair<std::string, InnovationLaw>> laws = {
      {"gamma innovation p=2 beta=0.5", GammaInnovation(2.0, 1.0, 0.5)},
      {"gamma innovation p=0.5 beta=0.9", GammaInnovation(0.5, 1.0, 0.9)},
      {"exponential innovation beta=0.5", ExpInnovation(1.0, 0.5)},
      {"bessel-k innovation p=1 beta=0.5", BkInnovation(1.0, 1.0, 0.5)},
      {"bessel-k innovation p=2/3 beta=0.9", BkInnovation(2.0 / 3.0, 1.0, 0.9)},
  };
  for (const auto& [name, law] : laws) {
    auto x = draw(n, rng, [&](RngHandle& r) { return sample_innovation(law, r); });
    const double err = cf_sup_error(x, grid, [&](double t) { return innovation_char_fn(law, t); });
    s.at_most(name, err, tol);
  }
  for (double p : {1.0 / 3.0, 1.0}) {
    const BKParams bk(p, 1.0);
    auto x = draw(n, rng, [&](RngHandle& r) { return sample_bk(bk, r); });
    const double err = cf_sup_error(
        x, grid, [&](double t) { return std::complex<double>(bk_char_fn(bk, t), 0.0); });
    s.at_most(fmt("bessel-k p=%.4g", p), err, tol);
  }
}

void suite_balance(const VerifyOptions& opt, VerifyReport& report) {
  Suite s("balance", report);
  const std::size_t n = scaled(4e5, opt.scale, 1000);
  const auto grid = default_balance_grid();
  RngHandle rng(opt.seed, 3);
  const StationarySampler exp1 = [](RngHandle& r) { return sample_exponential(1.0, r); };

  for (double p : {0.5, 1.0, 2.0}) {
    for (double beta : {0.5, 0.9}) {
      const StationarySampler st = [p](RngHandle& r) { return sample_gamma(p, 1.0, r); };
      const auto rep = detailed_balance_test(ScalarKernel(RcarGamma(p, 1.0, beta)), st, n, grid, rng);
      s.at_most(fmt("rcar-gamma p=%g beta=%g", p, beta), rep.sup_asymmetry, rep.tolerance);
    }
  }
  for (double beta : {0.5, 0.9}) {
    DetailedBalanceReport rep;
    if (opt.inject_fault) {
      // Recorded beta is `beta`; the reverse half silently uses another one.
      const double used = 0.6 * beta;
      const ScalarProposal faulty = [beta, used](double u, RngHandle& r) {
        return propose_symmetrized(
            u, [beta](double x, RngHandle& g) { return propose_exp_forward(x, 1.0, beta, g); },
            [used](double x, RngHandle& g) { return propose_exp_reverse(x, 1.0, used, g); }, r);
      };
      rep = detailed_balance_test(faulty, exp1, n, grid, rng);
    } else {
      const Symmetrized k(ExpForward(1.0, beta), ExpReverse(1.0, beta));
      rep = detailed_balance_test(ScalarKernel(k), exp1, n, grid, rng);
    }
    s.at_most(fmt("symmetrized exponential beta=%g", beta), rep.sup_asymmetry, rep.tolerance);
  }
  const auto fwd = detailed_balance_test(ScalarKernel(ExpForward(1.0, 0.5)), exp1, n, grid, rng);
  s.must_fail("exponential forward alone beta=0.5", fwd.sup_asymmetry, fwd.tolerance);
}

// Flat-likelihood chains accept every proposal, so stored states follow the
// prior. With beta = 0.5 and a stride of 25 the lag correlation is 0.5^25.
void suite_prior(const VerifyOptions& opt, VerifyReport& report) {
  Suite s("prior", report);
  const std::int64_t n_keep = static_cast<std::int64_t>(scaled(4000, opt.scale, 200));
  const std::int64_t thin = 25;
  const Potential flat = [](std::span<const double>) { return 0.0; };
  std::uint64_t stream = 100;

  auto chain = [&](const PriorSpec& prior, bool sarsd) {
    ChainConfig c;
    c.beta = 0.5;
    c.thin = thin;
    c.burnin = 0;
    c.n_steps = n_keep * thin;
    c.seed = opt.seed;
    c.stream_id = stream++;
    RngHandle rng(c.seed, c.stream_id);
    ChainRecord rec = sarsd ? run_lifted_sarsd(prior, flat, c, rng) : run_lifted_rcar(prior, flat, c, rng);
    s.at_least(rec.algorithm + fmt(" acceptance p=%.4g", prior.shape), rec.acceptance_rate().value_or(0.0),
               1.0);
    return rec;
  };
  RngHandle ref(opt.seed, 4);

  auto check_bk = [&](const ChainRecord& rec, const PriorSpec& prior, const std::string& label) {
    for (std::size_t k = 0; k < rec.dim; ++k) {
      const double sigma = prior.lambda * prior.gamma[k];
      const std::vector<double> x = rec.component(k);
      double pv = 0.0;
      if (prior.shape == 1.0) {
        pv = ks_test(x, [sigma](double t) { return laplace_cdf(t, sigma); }).p_value;
      } else {
        const BKParams bk(prior.shape, sigma);
        auto y = draw(4 * x.size(), ref, [&](RngHandle& r) { return sample_bk(bk, r); });
        pv = ks_test_2samp(x, y).p_value;
      }
      s.at_least(label + " coefficient " + std::to_string(k), pv, kKsLevel);
    }
  };
  auto check_gamma = [&](const ChainRecord& rec, const PriorSpec& prior, const std::string& label) {
    for (std::size_t k = 0; k < rec.dim; ++k) {
      const double sigma = prior.lambda * prior.gamma[k];
      const double p = prior.shape;
      const std::vector<double> x = rec.component(k);
      const double pv = ks_test(x, [p, sigma](double t) { return gamma_cdf(t, p, sigma); }).p_value;
      s.at_least(label + " coefficient " + std::to_string(k), pv, kKsLevel);
    }
  };

  for (double p : {1.0 / 3.0, 1.0, 2.0}) {
    const PriorSpec prior{PriorKind::BesselK, p, {1.0}, 1.0};
    check_bk(chain(prior, false), prior, fmt("rcar-bk 1d p=%.4g", p));
  }
  for (double p : {1.0, 2.0}) {
    const PriorSpec prior{PriorKind::BesselK, p, {1.0}, 1.0};
    check_bk(chain(prior, true), prior, fmt("sarsd-bk 1d p=%g", p));
  }
  {
    const PriorSpec prior{PriorKind::BesselK, 2.0 / 3.0, {1.0, 0.5, 0.25}, 2.0};
    check_bk(chain(prior, false), prior, "rcar-bk product p=2/3");
  }
  {
    const PriorSpec prior{PriorKind::BesselK, 1.0, {1.0, 0.5, 0.25}, 2.0};
    check_bk(chain(prior, true), prior, "sarsd-bk product p=1");
  }
  for (double p : {0.5, 2.0}) {
    const PriorSpec prior{PriorKind::Gamma, p, {1.0, 0.5}, 1.5};
    check_gamma(chain(prior, false), prior, fmt("rcar-gamma p=%g", p));
  }
  for (double p : {1.0, 3.0}) {
    const PriorSpec prior{PriorKind::Gamma, p, {1.0, 0.5}, 1.5};
    check_gamma(chain(prior, true), prior, fmt("sarsd-gamma p=%g", p));
  }
}

// Mass on [0, 1] is integrated after t = s^3, which removes the
// |t|^(2p-1) singularity at the origin for p < 1/2.
double bk_mass(const BKParams& bk) {
  const double a = std::min(1.0, bk.scale);
  const double hi = 40.0 * bk.scale;
  const double inner = integrate_adaptive(
      [&](double s) { return s == 0.0 ? 0.0 : bk_density(bk, s * s * s) * 3.0 * s * s; }, 0.0,
      std::cbrt(a), 1e-13, 1e-16);
  const double outer = integrate_adaptive([&](double t) { return bk_density(bk, t); }, a, hi, 1e-13, 1e-16);
  return 2.0 * (inner + outer);
}

void suite_density(const VerifyOptions&, VerifyReport& report) {
  Suite s("density", report);
  for (double p : {1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0, 2.0}) {
    for (double sigma : {0.5, 1.0}) {
      const double mass = bk_mass(BKParams(p, sigma));
      s.at_most(fmt("normalization p=%.4g sigma=%g", p, sigma), std::abs(mass - 1.0), 1e-6);
    }
  }
  for (double x : {0.1, 1.0, 10.0}) {
    const double exact = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);
    s.at_most(fmt("K_1/2 closed form x=%g", x), std::abs(bessel_k_nu(0.5, x) / exact - 1.0), 1e-10);
  }
}

void suite_haar(const VerifyOptions& opt, VerifyReport& report) {
  Suite s("haar", report);
  RngHandle rng(opt.seed, 5);
  for (std::size_t n : {8, 128, 1024}) {
    const std::vector<double> f = draw(n, rng, [](RngHandle& r) { return r.normal(); });
    const std::vector<double> c = haar_analyze(f);
    const std::vector<double> back = haar_synthesize(c, n);
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) err = std::max(err, std::abs(back[j] - f[j]));
    s.at_most("round trip n=" + std::to_string(n), err, 1e-10);

    double energy_f = 0.0;
    double energy_c = 0.0;
    for (double v : f) energy_f += v * v;
    for (double v : c) energy_c += v * v;
    energy_f /= static_cast<double>(n);
    s.at_most("parseval n=" + std::to_string(n), std::abs(energy_c - energy_f) / energy_f, 1e-10);
  }
  // Coarse coefficients synthesized on a finer grid analyze back with zero padding.
  const std::vector<double> c = draw(32, rng, [](RngHandle& r) { return r.normal(); });
  const std::vector<double> back = haar_analyze(haar_synthesize(c, 256));
  double err = 0.0;
  for (std::size_t k = 0; k < back.size(); ++k) err = std::max(err, std::abs(back[k] - (k < c.size() ? c[k] : 0.0)));
  s.at_most("coefficients round trip N=32 grid=256", err, 1e-10);
}

void suite_forward(const VerifyOptions& opt, VerifyReport& report) {
  Suite s("forward", report);
  RngHandle rng(opt.seed, 6);
  DeconvSetup setup;
  RngHandle data_rng(opt.seed, 7);
  const DeconvData data = make_synthetic_data(setup, data_rng);
  for (std::size_t n : {8, 32, 128}) {
    const DeconvForward fwd(setup, n);
    const auto x = draw(n, rng, [](RngHandle& r) { return r.normal(); });
    const auto y = draw(n, rng, [](RngHandle& r) { return r.normal(); });
    const double a = 0.7;
    const double b = -1.3;
    std::vector<double> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = a * x[k] + b * y[k];
    const auto gz = fwd.apply_direct(z);
    const auto gx = fwd.apply_direct(x);
    const auto gy = fwd.apply_direct(y);
    const auto mz = fwd.apply(z);
    double lin = 0.0;
    double mat = 0.0;
    for (std::size_t i = 0; i < gz.size(); ++i) {
      lin = std::max(lin, std::abs(gz[i] - (a * gx[i] + b * gy[i])));
      mat = std::max(mat, std::abs(gz[i] - mz[i]));
    }
    const std::string tag = " N=" + std::to_string(n);
    s.at_most("linearity" + tag, lin, 1e-10);
    s.at_most("matrix vs direct" + tag, mat, 1e-10);

    const auto grad = fwd.gradient(x, data.y);
    std::vector<double> probe = x;
    double gmax = 0.0;
    double gerr = 0.0;
    const double h = 1e-5;
    for (std::size_t k = 0; k < n; ++k) {
      probe[k] = x[k] + h;
      const double up = fwd.potential(probe, data.y);
      probe[k] = x[k] - h;
      const double dn = fwd.potential(probe, data.y);
      probe[k] = x[k];
      gerr = std::max(gerr, std::abs((up - dn) / (2.0 * h) - grad[k]));
      gmax = std::max(gmax, std::abs(grad[k]));
    }
    s.at_most("gradient finite difference" + tag, gerr / std::max(1.0, gmax), 1e-6);
  }
}

using SuiteFn = void (*)(const VerifyOptions&, VerifyReport&);

const std::vector<std::pair<std::string, SuiteFn>>& suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> s = {
      {"innovations", suite_innovations}, {"char-fn", suite_char_fn}, {"balance", suite_balance},
      {"prior", suite_prior},             {"density", suite_density}, {"haar", suite_haar},
      {"forward", suite_forward},
  };
  return s;
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : suites()) out.push_back(name);
    return out;
  }();
  return names;
}

std::vector<std::string> VerifyReport::failed_suites() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed && std::find(out.begin(), out.end(), c.suite) == out.end()) out.push_back(c.suite);
  }
  return out;
}

VerifyReport run_verify(const VerifyOptions& options) {
  if (!(options.scale > 0.0) || !std::isfinite(options.scale)) {
    throw ConfigError("scale: must be positive");
  }
  const auto& names = verify_suite_names();
  for (const auto& s : options.suites) {
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      throw ConfigError("suite: unknown suite '" + s + "'");
    }
  }
  const std::set<std::string> selected(options.suites.begin(), options.suites.end());
  const auto start = std::chrono::steady_clock::now();
  VerifyReport report;
  for (const auto& [name, fn] : suites()) {
    if (!selected.empty() && !selected.count(name)) continue;
    fn(options, report);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"suite", c.suite},
                      {"name", c.name},
                      {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr)},
                      {"threshold", c.threshold},
                      {"relation", c.relation},
                      {"passed", c.passed}});
  }
  return {{"passed", report.passed},
          {"failed_suites", report.failed_suites()},
          {"wall_seconds", report.wall_seconds},
          {"checks", checks}};
}

}  // namespace bkmcmc
