#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mh.hpp"
#include "rng.hpp"

namespace bkmcmc {

/// Haar function r_k at t in [0, 1): r_0 = 1, r_1 = +1 on [0, 1/2], -1 on
/// (1/2, 1), r_{2^j+m}(t) = 2^{j/2} r_1(2^j t - m).
double haar_eval(std::size_t k, double t);

/// gamma_0 = gamma_1 = 1, gamma_{2^j+m} = 2^{-2j}.
std::vector<double> deconv_gamma_sequence(std::size_t n);

/// Cell midpoints (i + 1/2)/n.
std::vector<double> midpoint_grid(std::size_t n);

/// True when n is a positive power of two.
bool is_dyadic(std::size_t n);

/// L2 Haar coefficients of a midpoint grid function (length 2^J), in the flat
/// (j, m) -> 2^j + m order. Uses the O(n) pyramid on g * sqrt(h).
std::vector<double> haar_analyze(std::span<const double> grid_values);

/// Inverse of haar_analyze: evaluates sum_k c_k r_k at the midpoints of a
/// grid with `grid_size` cells. Missing coefficients (k >= c.size()) are zero.
std::vector<double> haar_synthesize(std::span<const double> coeffs, std::size_t grid_size);

/// Evaluates lambda * sum_k gamma_k eta_k r_k on the grid.
std::vector<double> synthesize(const PriorSpec& prior, std::span<const double> eta,
                               std::size_t grid_size);

/// Scaled coefficients lambda * gamma_k * eta_k.
std::vector<double> scale_coefficients(const PriorSpec& prior, std::span<const double> eta);

struct PriorDraw {
  std::vector<double> eta;     // raw i.i.d. BK(p,1) or Gamm(p,1) draws
  std::vector<double> coeffs;  // lambda * gamma * eta
  std::vector<double> grid;    // Haar synthesis, empty when grid_size == 0
};

/// Exact prior draw. With grid_size > 0 the Haar synthesis is included.
PriorDraw sample_prior(const PriorSpec& prior, RngHandle& rng, std::size_t grid_size = 0);

}  // namespace bkmcmc
