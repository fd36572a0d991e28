#pragma once

#include <array>

namespace bocp {

// Values and physical derivatives of the 16 Bogner-Fox-Schmit shape
// functions of one cell. Local index is 4 * vertex + kind, with vertices
// ordered (0,0), (1,0), (0,1), (1,1) and kinds (value, dx, dy, dxy).
struct BfsShape {
  std::array<double, 16> value{};
  std::array<double, 16> dx{};
  std::array<double, 16> dy{};
  std::array<double, 16> dxx{};
  std::array<double, 16> dyy{};
  std::array<double, 16> dxy{};

  double laplacian(int i) const { return dxx[i] + dyy[i]; }
};

// (t, s) are reference coordinates in [0,1]^2 of a cell of width h.
BfsShape bfs_shape(double t, double s, double h);

// Discontinuous bicubic Lagrange basis on the equispaced 4x4 node lattice,
// local index 4 * ky + kx.
struct DgShape {
  std::array<double, 16> value{};
  std::array<double, 16> dx{};
  std::array<double, 16> dy{};
};

DgShape dg_shape(double t, double s, double h);

}  // namespace bocp
