#include <bocp/basis.hpp>

namespace bocp {

namespace {

struct Hermite1d {
  double value;
  double d1;
  double d2;
};

// Cubic Hermite function for end `node` (0 or 1) and kind 0 (value) or
// 1 (slope), with derivatives taken in physical units.
Hermite1d hermite(int node, int kind, double t, double h) {
  double t2 = t * t;
  double t3 = t2 * t;
  if (node == 0 && kind == 0) {
    return {1.0 - 3.0 * t2 + 2.0 * t3, (-6.0 * t + 6.0 * t2) / h, (-6.0 + 12.0 * t) / (h * h)};
  }
  if (node == 0 && kind == 1) {
    return {h * (t - 2.0 * t2 + t3), 1.0 - 4.0 * t + 3.0 * t2, (-4.0 + 6.0 * t) / h};
  }
  if (node == 1 && kind == 0) {
    return {3.0 * t2 - 2.0 * t3, (6.0 * t - 6.0 * t2) / h, (6.0 - 12.0 * t) / (h * h)};
  }
  return {h * (-t2 + t3), -2.0 * t + 3.0 * t2, (-2.0 + 6.0 * t) / h};
}

struct Lagrange1d {
  std::array<double, 4> value;
  std::array<double, 4> d1;
};

Lagrange1d lagrange(double t, double h) {
  constexpr std::array<double, 4> nodes = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  Lagrange1d out{};
  for (int k = 0; k < 4; k++) {
    double num = 1.0;
    double den = 1.0;
    double deriv = 0.0;
    for (int m = 0; m < 4; m++) {
      if (m == k) {
        continue;
      }
      den *= nodes[k] - nodes[m];
      double prod = 1.0;
      for (int q = 0; q < 4; q++) {
        if (q != k && q != m) {
          prod *= t - nodes[q];
        }
      }
      deriv += prod;
      num *= t - nodes[m];
    }
    out.value[k] = num / den;
    out.d1[k] = deriv / den / h;
  }
  return out;
}

}  // namespace

BfsShape bfs_shape(double t, double s, double h) {
  constexpr std::array<int, 4> vx = {0, 1, 0, 1};
  constexpr std::array<int, 4> vy = {0, 0, 1, 1};
  constexpr std::array<int, 4> kx = {0, 1, 0, 1};
  constexpr std::array<int, 4> ky = {0, 0, 1, 1};

  BfsShape shape;
  for (int a = 0; a < 4; a++) {
    for (int k = 0; k < 4; k++) {
      auto X = hermite(vx[a], kx[k], t, h);
      auto Y = hermite(vy[a], ky[k], s, h);
      int i = 4 * a + k;
      shape.value[i] = X.value * Y.value;
      shape.dx[i] = X.d1 * Y.value;
      shape.dy[i] = X.value * Y.d1;
      shape.dxx[i] = X.d2 * Y.value;
      shape.dyy[i] = X.value * Y.d2;
      shape.dxy[i] = X.d1 * Y.d1;
    }
  }
  return shape;
}

DgShape dg_shape(double t, double s, double h) {
  auto X = lagrange(t, h);
  auto Y = lagrange(s, h);
  DgShape shape;
  for (int ky = 0; ky < 4; ky++) {
    for (int kx = 0; kx < 4; kx++) {
      int i = 4 * ky + kx;
      shape.value[i] = X.value[kx] * Y.value[ky];
      shape.dx[i] = X.d1[kx] * Y.value[ky];
      shape.dy[i] = X.value[kx] * Y.d1[ky];
    }
  }
  return shape;
}

}  // namespace bocp
