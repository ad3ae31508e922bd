#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rng.hpp"

namespace testutil {

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Standard error of the mean for i.i.d. draws.
inline double se_mean(std::span<const double> x) {
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

template <class F>
std::vector<double> draws(std::size_t n, bkmcmc::RngHandle& rng, F&& f) {
  std::vector<double> out(n);
  for (auto& v : out) v = f(rng);
  return out;
}

// Standard error of a proportion estimate.
inline double se_prop(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

}  // namespace testutil
