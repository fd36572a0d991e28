#pragma once

#include <array>
#include <vector>

#include <json.hpp>

#include "types.hpp"

namespace bocp {

struct Point {
  double x;
  double y;
};

enum class Side { bottom, right, top, left };

struct BoundaryEdge {
  Index v0;
  Index v1;
  Index cell;
  Side side;
};

// Uniform grid of the unit square. Vertices and cells are numbered
// lexicographically by (y, x); the local vertex order of a cell is
// (0,0), (1,0), (0,1), (1,1).
struct Grid {
  Index n_cells_per_side = 0;
  double h = 0.0;
  std::vector<Point> vertices;
  std::vector<std::array<Index, 4>> cells;
  std::vector<Index> boundary_vertices;
  std::vector<BoundaryEdge> boundary_edges;

  Index n_vertices() const { return static_cast<Index>(vertices.size()); }
  Index n_cells() const { return static_cast<Index>(cells.size()); }
  Index vertex_index(Index i, Index j) const { return j * (n_cells_per_side + 1) + i; }
  Index cell_index(Index i, Index j) const { return j * n_cells_per_side + i; }
  Point cell_origin(Index cell) const { return vertices[cells[cell][0]]; }

  // Cell containing (x, y); points on shared edges go to the cell with the
  // larger index along each axis unless they lie on the far boundary.
  Index locate(double x, double y) const;
};

Grid build_grid(Index n_cells_per_side);

struct MeshHierarchy {
  std::vector<Grid> levels;

  const Grid& coarsest() const { return levels.front(); }
  const Grid& finest() const { return levels.back(); }
  Index n_levels() const { return static_cast<Index>(levels.size()); }
};

MeshHierarchy build_uniform_mesh(Index coarse_n, Index levels);

enum class SpaceTag { state_bfs, dg_bicubic };

// DOF kinds of a Bogner-Fox-Schmit vertex, in storage order.
enum BfsDof : int { bfs_value = 0, bfs_dx = 1, bfs_dy = 2, bfs_dxy = 3 };

struct DofMap {
  SpaceTag space = SpaceTag::dg_bicubic;
  Index total_dofs = 0;
  std::vector<Index> free_dofs;
  std::vector<Index> constrained_dofs;
  // Global DOF -> position among free DOFs, or -1 if constrained.
  std::vector<Index> free_index;
  std::vector<std::array<Index, 16>> cell_to_dofs;
  // BFS only: (value, dx, dy, dxy) per vertex.
  std::vector<std::array<Index, 4>> vertex_to_dofs;

  Index n_free() const { return static_cast<Index>(free_dofs.size()); }
};

// Essential elimination of the normal-derivative condition: at edge
// vertices the normal and mixed derivatives are constrained, at corners
// both first derivatives and the mixed derivative.
DofMap dof_map_bfs(const Grid& grid);

DofMap dof_map_dg(const Grid& grid);

nlohmann::json to_json(const Grid& grid);
nlohmann::json to_json(const DofMap& map);

}  // namespace bocp
