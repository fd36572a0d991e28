#pragma once

#include <array>
#include <functional>

#include "mesh.hpp"
#include "quadrature.hpp"
#include "types.hpp"

namespace bocp {

using ScalarField = std::function<double(double x, double y)>;

// Which second-order operator maps the state to the multiplier space.
// `helmholtz` is 1 - Laplacian, `laplace` is -Laplacian.
enum class StateOperator { helmholtz, laplace };

// Cell rule used by every volume form: 4x4 Gauss-Legendre.
const QuadratureRule& cell_rule();

// Edge rule used by every boundary form: 4-point Gauss-Legendre.
const QuadratureRule& edge_rule();

// DG mass matrix M (block diagonal, 16x16 per cell).
SparseMatrix assemble_mass_dg(const Grid& grid, const DofMap& dg);

// Boundary mass M_d on free BFS DOFs: int_{dOmega} u v ds.
SparseMatrix assemble_boundary_mass(const Grid& grid, const DofMap& bfs);

// L2(Omega) mass matrix on free BFS DOFs (full-domain observation).
SparseMatrix assemble_mass_bfs(const Grid& grid, const DofMap& bfs);

// Rectangular A: rows are DG DOFs, columns free BFS DOFs, entries
// int (L phi_j) psi_i with L = 1 - Laplacian (or -Laplacian).
SparseMatrix assemble_state_operator(const Grid& grid, const DofMap& bfs, const DofMap& dg,
                                     StateOperator op = StateOperator::helmholtz);

// b(u, v) = int Lap u Lap v + 2 grad u . grad v + u v for the Helmholtz
// state operator; int Lap u Lap v for the Laplace one. Either way the form
// equals (L u, L v)_{L2}.
SparseMatrix assemble_regularity_form(const Grid& grid, const DofMap& bfs,
                                      StateOperator op = StateOperator::helmholtz);

// int_{dOmega} d phi_j ds over free BFS DOFs.
Vector assemble_observation_rhs(const Grid& grid, const DofMap& bfs, const ScalarField& d);

// int_Omega g phi_j dx over free BFS DOFs.
Vector assemble_volume_rhs_bfs(const Grid& grid, const DofMap& bfs, const ScalarField& g);

// Exact embedding of consecutive BFS spaces: fine = P * coarse.
SparseMatrix assemble_prolongation(const Grid& coarse, const DofMap& coarse_map, const Grid& fine,
                                   const DofMap& fine_map);

// L2 projection onto the DG space.
Vector project_dg(const Grid& grid, const DofMap& dg, const ScalarField& g);

// Hermite data (value, dx, dy, dxy) at a point.
using HermiteData = std::function<std::array<double, 4>(double x, double y)>;

// BFS interpolant from vertex Hermite data; constrained DOFs are dropped.
Vector interpolate_bfs(const Grid& grid, const DofMap& bfs, const HermiteData& data);

// Coefficients of the constant function c (value DOFs c, derivatives 0).
Vector bfs_constant(const DofMap& bfs, double c);

struct FieldSample {
  double value;
  double dx;
  double dy;
  double dxy;
};

FieldSample evaluate_bfs(const Grid& grid, const DofMap& bfs, const Vector& free_coeffs, double x,
                         double y);

double evaluate_dg(const Grid& grid, const DofMap& dg, const Vector& coeffs, double x, double y);

}  // namespace bocp
