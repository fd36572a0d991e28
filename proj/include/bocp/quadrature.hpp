#pragma once

#include <vector>

namespace bocp {

// One-dimensional rule; tensor products give the cell rules.
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  int order = 0;  // polynomial degree integrated exactly

  int size() const { return static_cast<int>(points.size()); }
};

// n-point Gauss-Legendre rule on [a, b], exact through degree 2n - 1.
QuadratureRule gauss_legendre(int n, double a = 0.0, double b = 1.0);

}  // namespace bocp
