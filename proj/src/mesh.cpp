#include <bocp/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bocp {

Index Grid::locate(double x, double y) const {
  auto n = n_cells_per_side;
  auto i = std::clamp(static_cast<Index>(std::floor(x / h)), Index{0}, n - 1);
  auto j = std::clamp(static_cast<Index>(std::floor(y / h)), Index{0}, n - 1);
  return cell_index(i, j);
}

Grid build_grid(Index n_cells_per_side) {
  if (n_cells_per_side < 1) {
    throw std::invalid_argument("grid needs at least one cell per side");
  }

  Grid grid;
  auto n = n_cells_per_side;
  grid.n_cells_per_side = n;
  grid.h = 1.0 / static_cast<double>(n);

  grid.vertices.reserve((n + 1) * (n + 1));
  for (Index j = 0; j <= n; j++) {
    for (Index i = 0; i <= n; i++) {
      // i / n rather than i * h so that nested grids share exact coordinates.
      grid.vertices.push_back({static_cast<double>(i) / static_cast<double>(n),
                               static_cast<double>(j) / static_cast<double>(n)});
    }
  }

  grid.cells.reserve(n * n);
  for (Index j = 0; j < n; j++) {
    for (Index i = 0; i < n; i++) {
      grid.cells.push_back({grid.vertex_index(i, j), grid.vertex_index(i + 1, j),
                            grid.vertex_index(i, j + 1), grid.vertex_index(i + 1, j + 1)});
    }
  }

  for (Index j = 0; j <= n; j++) {
    for (Index i = 0; i <= n; i++) {
      if (i == 0 || j == 0 || i == n || j == n) {
        grid.boundary_vertices.push_back(grid.vertex_index(i, j));
      }
    }
  }

  for (Index i = 0; i < n; i++) {
    grid.boundary_edges.push_back(
        {grid.vertex_index(i, 0), grid.vertex_index(i + 1, 0), grid.cell_index(i, 0), Side::bottom});
    grid.boundary_edges.push_back({grid.vertex_index(i, n), grid.vertex_index(i + 1, n),
                                   grid.cell_index(i, n - 1), Side::top});
  }
  for (Index j = 0; j < n; j++) {
    grid.boundary_edges.push_back(
        {grid.vertex_index(0, j), grid.vertex_index(0, j + 1), grid.cell_index(0, j), Side::left});
    grid.boundary_edges.push_back({grid.vertex_index(n, j), grid.vertex_index(n, j + 1),
                                   grid.cell_index(n - 1, j), Side::right});
  }

  return grid;
}

MeshHierarchy build_uniform_mesh(Index coarse_n, Index levels) {
  if (coarse_n < 1) {
    throw std::invalid_argument("coarse_n must be positive");
  }
  if (levels < 0) {
    throw std::invalid_argument("levels must be non-negative");
  }

  MeshHierarchy hierarchy;
  auto n = coarse_n;
  for (Index l = 0; l <= levels; l++) {
    hierarchy.levels.push_back(build_grid(n));
    n *= 2;
  }
  return hierarchy;
}

DofMap dof_map_bfs(const Grid& grid) {
  DofMap map;
  map.space = SpaceTag::state_bfs;
  auto n = grid.n_cells_per_side;
  map.total_dofs = 4 * grid.n_vertices();

  std::vector<bool> constrained(map.total_dofs, false);
  map.vertex_to_dofs.resize(grid.n_vertices());
  for (Index j = 0; j <= n; j++) {
    for (Index i = 0; i <= n; i++) {
      auto v = grid.vertex_index(i, j);
      for (int k = 0; k < 4; k++) {
        map.vertex_to_dofs[v][k] = 4 * v + k;
      }

      bool on_vertical = i == 0 || i == n;    // normal is x
      bool on_horizontal = j == 0 || j == n;  // normal is y
      if (on_vertical) {
        constrained[4 * v + bfs_dx] = true;
      }
      if (on_horizontal) {
        constrained[4 * v + bfs_dy] = true;
      }
      if (on_vertical || on_horizontal) {
        constrained[4 * v + bfs_dxy] = true;
      }
    }
  }

  map.free_index.assign(map.total_dofs, -1);
  for (Index d = 0; d < map.total_dofs; d++) {
    if (constrained[d]) {
      map.constrained_dofs.push_back(d);
    } else {
      map.free_index[d] = map.n_free();
      map.free_dofs.push_back(d);
    }
  }

  map.cell_to_dofs.resize(grid.n_cells());
  for (Index c = 0; c < grid.n_cells(); c++) {
    for (int a = 0; a < 4; a++) {
      for (int k = 0; k < 4; k++) {
        map.cell_to_dofs[c][4 * a + k] = 4 * grid.cells[c][a] + k;
      }
    }
  }
  return map;
}

DofMap dof_map_dg(const Grid& grid) {
  DofMap map;
  map.space = SpaceTag::dg_bicubic;
  map.total_dofs = 16 * grid.n_cells();
  map.free_dofs.resize(map.total_dofs);
  map.free_index.resize(map.total_dofs);
  for (Index d = 0; d < map.total_dofs; d++) {
    map.free_dofs[d] = d;
    map.free_index[d] = d;
  }
  map.cell_to_dofs.resize(grid.n_cells());
  for (Index c = 0; c < grid.n_cells(); c++) {
    for (int k = 0; k < 16; k++) {
      map.cell_to_dofs[c][k] = 16 * c + k;
    }
  }
  return map;
}

nlohmann::json to_json(const Grid& grid) {
  nlohmann::json j;
  j["n_cells_per_side"] = grid.n_cells_per_side;
  j["h"] = grid.h;
  auto& vertices = j["vertices"] = nlohmann::json::array();
  for (const auto& p : grid.vertices) {
    vertices.push_back({p.x, p.y});
  }
  j["cells"] = grid.cells;
  j["boundary_vertices"] = grid.boundary_vertices;
  auto& edges = j["boundary_edges"] = nlohmann::json::array();
  for (const auto& e : grid.boundary_edges) {
    edges.push_back({e.v0, e.v1});
  }
  return j;
}

nlohmann::json to_json(const DofMap& map) {
  nlohmann::json j;
  j["space"] = map.space == SpaceTag::state_bfs ? "state_bfs" : "dg_bicubic";
  j["total_dofs"] = map.total_dofs;
  j["free_dofs"] = map.free_dofs;
  j["constrained_dofs"] = map.constrained_dofs;
  j["cell_to_dofs"] = map.cell_to_dofs;
  if (map.space == SpaceTag::state_bfs) {
    j["vertex_to_dofs"] = map.vertex_to_dofs;
  }
  return j;
}

}  // namespace bocp
