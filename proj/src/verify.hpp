#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace bkmcmc {

// Distributional property suites bundled for the `verify` command:
//   innovations   self-decomposition composition checks (two-sample KS)
//   char-fn       empirical vs closed-form characteristic functions
//   balance       joint-CF symmetry of the scalar kernels
//   prior         flat-likelihood chains recover the prior (KS)
//   density       Bessel-K density normalization and K_{1/2} closed form
//   haar          Haar round trip and Parseval
//   forward       deconvolution map linearity and gradient

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  std::vector<std::string> suites;  // empty runs all
  // Sample-size multiplier; 1 reproduces the release gate sizes.
  double scale = 1.0;
  // Negative control: the symmetrized exponential kernel records one beta
  // but its reverse half runs with another. The balance suite must fail.
  bool inject_fault = false;
};

struct VerifyCheck {
  std::string suite;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  // "<=": pass iff value <= threshold; ">=": pass iff value >= threshold;
  // "fails": the underlying test is expected to reject (value > threshold).
  std::string relation;
  bool passed = false;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed = true;
  double wall_seconds = 0.0;
  std::vector<std::string> failed_suites() const;
};

const std::vector<std::string>& verify_suite_names();

/// Throws ConfigError for unknown suite names or a non-positive scale.
VerifyReport run_verify(const VerifyOptions& options);

nlohmann::json to_json(const VerifyReport& report);

}  // namespace bkmcmc
