#include <bocp/assembly.hpp>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <stdexcept>

#include <bocp/basis.hpp>
#include <bocp/sparse.hpp>

namespace bocp {

namespace {

using Local = Eigen::Matrix<double, 16, 16>;
using Triplets = std::vector<Eigen::Triplet<double>>;

// Local matrices are identical on every cell of a uniform grid, so they
// are integrated once and scattered.
struct CellQuadrature {
  std::vector<BfsShape> bfs;
  std::vector<DgShape> dg;
  std::vector<double> weights;  // physical weights, include h^2
};

CellQuadrature cell_quadrature(double h) {
  const auto& rule = cell_rule();
  CellQuadrature q;
  for (int j = 0; j < rule.size(); j++) {
    for (int i = 0; i < rule.size(); i++) {
      double t = rule.points[i];
      double s = rule.points[j];
      q.bfs.push_back(bfs_shape(t, s, h));
      q.dg.push_back(dg_shape(t, s, h));
      q.weights.push_back(rule.weights[i] * rule.weights[j] * h * h);
    }
  }
  return q;
}

double state_image(const BfsShape& shape, int j, StateOperator op) {
  double lap = shape.laplacian(j);
  return op == StateOperator::helmholtz ? shape.value[j] - lap : -lap;
}

void scatter(Triplets& triplets, const Local& local, const std::array<Index, 16>& rows,
             const DofMap& row_map, const std::array<Index, 16>& cols, const DofMap& col_map) {
  for (int a = 0; a < 16; a++) {
    auto r = row_map.free_index[rows[a]];
    if (r < 0) {
      continue;
    }
    for (int b = 0; b < 16; b++) {
      auto c = col_map.free_index[cols[b]];
      if (c < 0 || local(a, b) == 0.0) {
        continue;
      }
      triplets.emplace_back(r, c, local(a, b));
    }
  }
}

SparseMatrix assemble_cellwise(const Grid& grid, const Local& local, const DofMap& row_map,
                               const DofMap& col_map) {
  Triplets triplets;
  triplets.reserve(grid.n_cells() * 256);
  for (Index c = 0; c < grid.n_cells(); c++) {
    scatter(triplets, local, row_map.cell_to_dofs[c], row_map, col_map.cell_to_dofs[c], col_map);
  }
  return from_triplets(row_map.n_free(), col_map.n_free(), triplets);
}

// Reference coordinates of the edge-rule points on one side of a cell.
std::pair<double, double> edge_point(Side side, double r) {
  switch (side) {
    case Side::bottom:
      return {r, 0.0};
    case Side::top:
      return {r, 1.0};
    case Side::left:
      return {0.0, r};
    case Side::right:
      return {1.0, r};
  }
  return {0.0, 0.0};
}

}  // namespace

const QuadratureRule& cell_rule() {
  static const QuadratureRule rule = gauss_legendre(4);
  return rule;
}

const QuadratureRule& edge_rule() {
  static const QuadratureRule rule = gauss_legendre(4);
  return rule;
}

SparseMatrix assemble_mass_dg(const Grid& grid, const DofMap& dg) {
  auto q = cell_quadrature(grid.h);
  Local local = Local::Zero();
  for (std::size_t p = 0; p < q.weights.size(); p++) {
    for (int a = 0; a < 16; a++) {
      for (int b = 0; b < 16; b++) {
        local(a, b) += q.weights[p] * q.dg[p].value[a] * q.dg[p].value[b];
      }
    }
  }
  return symmetrized(assemble_cellwise(grid, local, dg, dg));
}

SparseMatrix assemble_mass_bfs(const Grid& grid, const DofMap& bfs) {
  auto q = cell_quadrature(grid.h);
  Local local = Local::Zero();
  for (std::size_t p = 0; p < q.weights.size(); p++) {
    for (int a = 0; a < 16; a++) {
      for (int b = 0; b < 16; b++) {
        local(a, b) += q.weights[p] * q.bfs[p].value[a] * q.bfs[p].value[b];
      }
    }
  }
  return symmetrized(assemble_cellwise(grid, local, bfs, bfs));
}

SparseMatrix assemble_state_operator(const Grid& grid, const DofMap& bfs, const DofMap& dg,
                                     StateOperator op) {
  auto q = cell_quadrature(grid.h);
  Local local = Local::Zero();
  for (std::size_t p = 0; p < q.weights.size(); p++) {
    for (int b = 0; b < 16; b++) {
      double image = state_image(q.bfs[p], b, op);
      for (int a = 0; a < 16; a++) {
        local(a, b) += q.weights[p] * image * q.dg[p].value[a];
      }
    }
  }
  return assemble_cellwise(grid, local, dg, bfs);
}

SparseMatrix assemble_regularity_form(const Grid& grid, const DofMap& bfs, StateOperator op) {
  auto q = cell_quadrature(grid.h);
  double grad_weight = op == StateOperator::helmholtz ? 2.0 : 0.0;
  double mass_weight = op == StateOperator::helmholtz ? 1.0 : 0.0;
  Local local = Local::Zero();
  for (std::size_t p = 0; p < q.weights.size(); p++) {
    const auto& s = q.bfs[p];
    for (int a = 0; a < 16; a++) {
      for (int b = 0; b < 16; b++) {
        double integrand = s.laplacian(a) * s.laplacian(b) +
                           grad_weight * (s.dx[a] * s.dx[b] + s.dy[a] * s.dy[b]) +
                           mass_weight * s.value[a] * s.value[b];
        local(a, b) += q.weights[p] * integrand;
      }
    }
  }
  return symmetrized(assemble_cellwise(grid, local, bfs, bfs));
}

SparseMatrix assemble_boundary_mass(const Grid& grid, const DofMap& bfs) {
  const auto& rule = edge_rule();
  Triplets triplets;
  for (const auto& edge : grid.boundary_edges) {
    Local local = Local::Zero();
    for (int p = 0; p < rule.size(); p++) {
      auto [t, s] = edge_point(edge.side, rule.points[p]);
      auto shape = bfs_shape(t, s, grid.h);
      double w = rule.weights[p] * grid.h;
      for (int a = 0; a < 16; a++) {
        for (int b = 0; b < 16; b++) {
          local(a, b) += w * shape.value[a] * shape.value[b];
        }
      }
    }
    const auto& dofs = bfs.cell_to_dofs[edge.cell];
    scatter(triplets, local, dofs, bfs, dofs, bfs);
  }
  return symmetrized(from_triplets(bfs.n_free(), bfs.n_free(), triplets));
}

Vector assemble_observation_rhs(const Grid& grid, const DofMap& bfs, const ScalarField& d) {
  const auto& rule = edge_rule();
  Vector rhs = Vector::Zero(bfs.n_free());
  for (const auto& edge : grid.boundary_edges) {
    auto origin = grid.cell_origin(edge.cell);
    const auto& dofs = bfs.cell_to_dofs[edge.cell];
    for (int p = 0; p < rule.size(); p++) {
      auto [t, s] = edge_point(edge.side, rule.points[p]);
      auto shape = bfs_shape(t, s, grid.h);
      double value = d(origin.x + t * grid.h, origin.y + s * grid.h);
      double w = rule.weights[p] * grid.h;
      for (int a = 0; a < 16; a++) {
        auto i = bfs.free_index[dofs[a]];
        if (i >= 0) {
          rhs[i] += w * value * shape.value[a];
        }
      }
    }
  }
  return rhs;
}

Vector assemble_volume_rhs_bfs(const Grid& grid, const DofMap& bfs, const ScalarField& g) {
  const auto& rule = cell_rule();
  Vector rhs = Vector::Zero(bfs.n_free());
  for (Index c = 0; c < grid.n_cells(); c++) {
    auto origin = grid.cell_origin(c);
    const auto& dofs = bfs.cell_to_dofs[c];
    for (int j = 0; j < rule.size(); j++) {
      for (int i = 0; i < rule.size(); i++) {
        double t = rule.points[i];
        double s = rule.points[j];
        auto shape = bfs_shape(t, s, grid.h);
        double w = rule.weights[i] * rule.weights[j] * grid.h * grid.h;
        double value = g(origin.x + t * grid.h, origin.y + s * grid.h);
        for (int a = 0; a < 16; a++) {
          auto k = bfs.free_index[dofs[a]];
          if (k >= 0) {
            rhs[k] += w * value * shape.value[a];
          }
        }
      }
    }
  }
  return rhs;
}

SparseMatrix assemble_prolongation(const Grid& coarse, const DofMap& coarse_map, const Grid& fine,
                                   const DofMap& fine_map) {
  if (fine.n_cells_per_side != 2 * coarse.n_cells_per_side) {
    throw std::invalid_argument("prolongation needs consecutive hierarchy levels");
  }

  Triplets triplets;
  for (Index v = 0; v < fine.n_vertices(); v++) {
    auto p = fine.vertices[v];
    auto cell = coarse.locate(p.x, p.y);
    auto origin = coarse.cell_origin(cell);
    double t = (p.x - origin.x) / coarse.h;
    double s = (p.y - origin.y) / coarse.h;
    auto shape = bfs_shape(t, s, coarse.h);
    const std::array<const std::array<double, 16>*, 4> data = {&shape.value, &shape.dx, &shape.dy,
                                                               &shape.dxy};
    const auto& coarse_dofs = coarse_map.cell_to_dofs[cell];
    for (int k = 0; k < 4; k++) {
      auto row = fine_map.free_index[fine_map.vertex_to_dofs[v][k]];
      if (row < 0) {
        continue;
      }
      for (int a = 0; a < 16; a++) {
        auto col = coarse_map.free_index[coarse_dofs[a]];
        double value = (*data[k])[a];
        if (col >= 0 && value != 0.0) {
          triplets.emplace_back(row, col, value);
        }
      }
    }
  }
  return from_triplets(fine_map.n_free(), coarse_map.n_free(), triplets);
}

Vector project_dg(const Grid& grid, const DofMap& dg, const ScalarField& g) {
  const auto& rule = cell_rule();
  auto q = cell_quadrature(grid.h);
  Local local_mass = Local::Zero();
  for (std::size_t p = 0; p < q.weights.size(); p++) {
    for (int a = 0; a < 16; a++) {
      for (int b = 0; b < 16; b++) {
        local_mass(a, b) += q.weights[p] * q.dg[p].value[a] * q.dg[p].value[b];
      }
    }
  }
  Eigen::LLT<Local> llt(local_mass);

  Vector coeffs(dg.n_free());
  for (Index c = 0; c < grid.n_cells(); c++) {
    auto origin = grid.cell_origin(c);
    Eigen::Matrix<double, 16, 1> load = Eigen::Matrix<double, 16, 1>::Zero();
    std::size_t p = 0;
    for (int j = 0; j < rule.size(); j++) {
      for (int i = 0; i < rule.size(); i++, p++) {
        double value = g(origin.x + rule.points[i] * grid.h, origin.y + rule.points[j] * grid.h);
        for (int a = 0; a < 16; a++) {
          load[a] += q.weights[p] * value * q.dg[p].value[a];
        }
      }
    }
    Eigen::Matrix<double, 16, 1> local = llt.solve(load);
    for (int a = 0; a < 16; a++) {
      coeffs[dg.cell_to_dofs[c][a]] = local[a];
    }
  }
  return coeffs;
}

Vector interpolate_bfs(const Grid& grid, const DofMap& bfs, const HermiteData& data) {
  Vector coeffs = Vector::Zero(bfs.n_free());
  for (Index v = 0; v < grid.n_vertices(); v++) {
    auto p = grid.vertices[v];
    auto values = data(p.x, p.y);
    for (int k = 0; k < 4; k++) {
      auto i = bfs.free_index[bfs.vertex_to_dofs[v][k]];
      if (i >= 0) {
        coeffs[i] = values[k];
      }
    }
  }
  return coeffs;
}

Vector bfs_constant(const DofMap& bfs, double c) {
  Vector coeffs = Vector::Zero(bfs.n_free());
  for (const auto& dofs : bfs.vertex_to_dofs) {
    auto i = bfs.free_index[dofs[bfs_value]];
    if (i >= 0) {
      coeffs[i] = c;
    }
  }
  return coeffs;
}

FieldSample evaluate_bfs(const Grid& grid, const DofMap& bfs, const Vector& free_coeffs, double x,
                         double y) {
  auto cell = grid.locate(x, y);
  auto origin = grid.cell_origin(cell);
  auto shape = bfs_shape((x - origin.x) / grid.h, (y - origin.y) / grid.h, grid.h);
  FieldSample out{0.0, 0.0, 0.0, 0.0};
  for (int a = 0; a < 16; a++) {
    auto i = bfs.free_index[bfs.cell_to_dofs[cell][a]];
    if (i < 0) {
      continue;
    }
    double c = free_coeffs[i];
    out.value += c * shape.value[a];
    out.dx += c * shape.dx[a];
    out.dy += c * shape.dy[a];
    out.dxy += c * shape.dxy[a];
  }
  return out;
}

double evaluate_dg(const Grid& grid, const DofMap& dg, const Vector& coeffs, double x, double y) {
  auto cell = grid.locate(x, y);
  auto origin = grid.cell_origin(cell);
  auto shape = dg_shape((x - origin.x) / grid.h, (y - origin.y) / grid.h, grid.h);
  double value = 0.0;
  for (int a = 0; a < 16; a++) {
    value += coeffs[dg.cell_to_dofs[cell][a]] * shape.value[a];
  }
  return value;
}

}  // namespace bocp
