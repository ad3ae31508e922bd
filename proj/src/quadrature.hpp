#pragma once

#include <functional>

namespace bkmcmc {

/// Adaptive Gauss–Legendre quadrature on [a, b].
///
/// Each panel is integrated with a 16-point rule and compared against the
/// sum over its two halves; panels are bisected until the difference is
/// below max(abs_tol, rel_tol * |estimate|) scaled to the panel width.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-13, double abs_tol = 0.0, int max_depth = 40);

}  // namespace bkmcmc
