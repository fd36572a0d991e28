#include <bocp/quadrature.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bocp {

namespace {

// Legendre P_n(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    return {1.0, 0.0};
  }
  for (int k = 2; k <= n; k++) {
    double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) {
    throw std::invalid_argument("quadrature needs at least one point");
  }

  QuadratureRule rule;
  rule.order = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);

  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  for (int i = 0; i < n; i++) {
    // Chebyshev-like initial guess, then Newton.
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; it++) {
      auto [p, dp] = legendre(n, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    auto [p, dp] = legendre(n, x);
    (void)p;
    rule.points[i] = mid + half * x;
    rule.weights[i] = half * 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace bocp
