#include <doctest.h>

#include <algorithm>
#include <set>

#include <bocp/mesh.hpp>

using namespace bocp;

TEST_SUITE("mesh") {
  TEST_CASE("single level counts") {
    auto m = build_uniform_mesh(8, 0);
    REQUIRE(m.n_levels() == 1);
    CHECK(m.finest().n_cells() == 64);
    CHECK(m.finest().n_vertices() == 81);
    CHECK(m.finest().h == doctest::Approx(1.0 / 8));
  }

  TEST_CASE("five levels reach h = 2^-7") {
    auto m = build_uniform_mesh(8, 4);
    REQUIRE(m.n_levels() == 5);
    CHECK(m.finest().h == 1.0 / 128);
    CHECK(m.finest().n_cells_per_side == 128);
    for (Index l = 1; l < m.n_levels(); l++) {
      CHECK(m.levels[l].h == m.levels[l - 1].h / 2);
    }
  }

  TEST_CASE("nestedness") {
    for (auto [n, levels] : {std::pair<Index, Index>{1, 1}, {2, 3}, {3, 2}}) {
      auto m = build_uniform_mesh(n, levels);
      for (Index l = 1; l < m.n_levels(); l++) {
        const auto& coarse = m.levels[l - 1];
        const auto& fine = m.levels[l];
        for (const auto& p : coarse.vertices) {
          auto hits = std::count_if(fine.vertices.begin(), fine.vertices.end(),
                                    [&](const Point& q) { return q.x == p.x && q.y == p.y; });
          CHECK(hits == 1);
        }
      }
    }
    auto base = build_uniform_mesh(1, 1);
    CHECK(base.coarsest().n_cells() == 1);
    CHECK(base.finest().n_cells() == 4);
  }

  TEST_CASE("invalid sizes are rejected") {
    CHECK_THROWS_AS(build_uniform_mesh(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_uniform_mesh(2, -1), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(0), std::invalid_argument);
  }

  TEST_CASE("boundary data") {
    auto g = build_grid(5);
    CHECK(g.boundary_vertices.size() == 20);
    CHECK(g.boundary_edges.size() == 20);
    for (const auto& e : g.boundary_edges) {
      auto a = g.vertices[e.v0];
      auto b = g.vertices[e.v1];
      CHECK(std::abs(a.x - b.x) + std::abs(a.y - b.y) == doctest::Approx(g.h));
      bool on_boundary = (a.x == b.x && (a.x == 0.0 || a.x == 1.0)) || (a.y == b.y && (a.y == 0.0 || a.y == 1.0));
      CHECK(on_boundary);
    }
    CHECK(g.vertex_index(2, 3) == 3 * 6 + 2);
    CHECK(g.locate(0.999999, 0.0) == g.cell_index(4, 0));
    CHECK(g.locate(1.0, 1.0) == g.cell_index(4, 4));
  }

  TEST_CASE("BFS DOF counts") {
    auto g2 = build_grid(2);
    auto m2 = dof_map_bfs(g2);
    CHECK(m2.total_dofs == 36);
    CHECK(m2.constrained_dofs.size() == 20);
    CHECK(m2.n_free() == 16);

    auto g1 = build_grid(1);
    auto m1 = dof_map_bfs(g1);
    CHECK(m1.total_dofs == 16);
    CHECK(m1.constrained_dofs.size() == 12);
    REQUIRE(m1.n_free() == 4);
    for (auto d : m1.free_dofs) {
      CHECK(d % 4 == bfs_value);
    }
  }

  TEST_CASE("BFS constraint rule, exhaustive small grids") {
    for (Index n = 1; n <= 16; n++) {
      auto g = build_grid(n);
      auto m = dof_map_bfs(g);
      Index edge_vertices = 4 * (n - 1);
      CHECK(m.total_dofs == 4 * g.n_vertices());
      CHECK(static_cast<Index>(m.constrained_dofs.size()) == 12 + 2 * edge_vertices);

      std::set<Index> all(m.free_dofs.begin(), m.free_dofs.end());
      for (auto c : m.constrained_dofs) {
        CHECK(all.insert(c).second);
      }
      CHECK(static_cast<Index>(all.size()) == m.total_dofs);

      for (Index v = 0; v < g.n_vertices(); v++) {
        auto p = g.vertices[v];
        bool on_x = p.x == 0.0 || p.x == 1.0;
        bool on_y = p.y == 0.0 || p.y == 1.0;
        const auto& dofs = m.vertex_to_dofs[v];
        CHECK(m.free_index[dofs[bfs_value]] >= 0);
        CHECK((m.free_index[dofs[bfs_dx]] < 0) == on_x);
        CHECK((m.free_index[dofs[bfs_dy]] < 0) == on_y);
        CHECK((m.free_index[dofs[bfs_dxy]] < 0) == (on_x || on_y));
      }
    }
  }

  TEST_CASE("DG DOF map") {
    CHECK(dof_map_dg(build_grid(2)).total_dofs == 64);
    auto m = dof_map_dg(build_grid(8));
    CHECK(m.total_dofs == 1024);
    CHECK(m.constrained_dofs.empty());
    CHECK(m.n_free() == 1024);
    std::set<Index> seen;
    for (const auto& cell : m.cell_to_dofs) {
      for (auto d : cell) {
        CHECK(seen.insert(d).second);
      }
    }
  }

  TEST_CASE("JSON dump") {
    auto g = build_grid(2);
    auto j = to_json(g);
    CHECK(j["n_cells_per_side"] == 2);
    CHECK(j["vertices"].size() == 9);
    auto jm = to_json(dof_map_bfs(g));
    CHECK(jm["total_dofs"] == 36);
  }
}
