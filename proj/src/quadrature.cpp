#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace bkmcmc {

namespace {

constexpr int kOrder = 16;

struct GaussLegendreRule {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};

  GaussLegendreRule() {
    for (int i = 0; i < kOrder; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= kOrder; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendreRule& rule() {
  static const GaussLegendreRule r;
  return r;
}

double panel(const std::function<double(double)>& f, double a, double b) {
  const auto& r = rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < kOrder; ++i) sum += r.weights[i] * f(mid + half * r.nodes[i]);
  return half * sum;
}

double refine(const std::function<double(double)>& f, double a, double b, double whole,
              double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = panel(f, a, mid);
  const double right = panel(f, mid, b);
  const double both = left + right;
  if (depth <= 0 || std::fabs(both - whole) <= tol) return both;
  return refine(f, a, mid, left, 0.5 * tol, depth - 1) +
         refine(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double whole = panel(f, a, b);
  const double tol = std::max(abs_tol, rel_tol * std::fabs(whole));
  return refine(f, a, b, whole, tol, max_depth);
}

}  // namespace bkmcmc
