#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>

#include <bocp/assembly.hpp>
#include <bocp/basis.hpp>
#include <bocp/quadrature.hpp>
#include <bocp/sparse.hpp>

using namespace bocp;

namespace {

// Cubic with zero slope at both ends, so products satisfy the BFS
// boundary constraints.
double g(double x) { return (3.0 - 2.0 * x) * x * x; }
double dg1(double x) { return 6.0 * x * (1.0 - x); }

std::array<double, 4> smooth_hermite(double x, double y) {
  return {g(x) * g(y) + 1.0, dg1(x) * g(y), g(x) * dg1(y), dg1(x) * dg1(y)};
}

Vector dg_ones(const DofMap& dg) { return Vector::Ones(dg.total_dofs); }

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre integrates monomials exactly") {
    for (int n = 1; n <= 6; n++) {
      auto rule = gauss_legendre(n);
      CHECK(rule.size() == n);
      CHECK(rule.order == 2 * n - 1);
      for (int k = 0; k <= 2 * n - 1; k++) {
        double sum = 0.0;
        for (int q = 0; q < n; q++) {
          sum += rule.weights[q] * std::pow(rule.points[q], k);
        }
        CHECK(sum == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("mapped interval") {
    auto rule = gauss_legendre(3, -1.0, 2.0);
    double sum = 0.0;
    for (int q = 0; q < 3; q++) {
      sum += rule.weights[q] * rule.points[q] * rule.points[q];
    }
    CHECK(sum == doctest::Approx(3.0));
    CHECK_THROWS(gauss_legendre(0));
  }
}

TEST_SUITE("basis") {
  TEST_CASE("BFS shape functions interpolate Hermite data") {
    double h = 0.5;
    for (int v = 0; v < 4; v++) {
      double t = v % 2, s = v / 2;
      auto sh = bfs_shape(t, s, h);
      for (int i = 0; i < 16; i++) {
        int vi = i / 4, kind = i % 4;
        double expect_value = (vi == v && kind == bfs_value) ? 1.0 : 0.0;
        double expect_dx = (vi == v && kind == bfs_dx) ? 1.0 : 0.0;
        double expect_dy = (vi == v && kind == bfs_dy) ? 1.0 : 0.0;
        double expect_dxy = (vi == v && kind == bfs_dxy) ? 1.0 : 0.0;
        CHECK(sh.value[i] == doctest::Approx(expect_value));
        CHECK(sh.dx[i] == doctest::Approx(expect_dx));
        CHECK(sh.dy[i] == doctest::Approx(expect_dy));
        CHECK(sh.dxy[i] == doctest::Approx(expect_dxy));
      }
    }
  }

  TEST_CASE("DG shapes form a partition of unity and a nodal basis") {
    auto sh = dg_shape(0.3, 0.7, 0.25);
    double sum = 0.0, dsum = 0.0;
    for (int i = 0; i < 16; i++) {
      sum += sh.value[i];
      dsum += sh.dx[i];
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(dsum == doctest::Approx(0.0).epsilon(1e-12));
    for (int ky = 0; ky < 4; ky++) {
      for (int kx = 0; kx < 4; kx++) {
        auto n = dg_shape(kx / 3.0, ky / 3.0, 1.0);
        for (int i = 0; i < 16; i++) {
          CHECK(n.value[i] == doctest::Approx(i == 4 * ky + kx ? 1.0 : 0.0));
        }
      }
    }
  }
}

TEST_SUITE("assembly") {
  TEST_CASE("integrals of constants") {
    for (Index n : {1, 2, 4}) {
      auto grid = build_grid(n);
      auto bfs = dof_map_bfs(grid);
      auto dg = dof_map_dg(grid);
      auto m = assemble_mass_dg(grid, dg);
      auto md = assemble_boundary_mass(grid, bfs);
      auto mb = assemble_mass_bfs(grid, bfs);
      auto r = assemble_regularity_form(grid, bfs);
      Vector one_dg = dg_ones(dg);
      Vector one_bfs = bfs_constant(bfs, 1.0);
      CHECK(one_dg.dot(m * one_dg) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(one_bfs.dot(md * one_bfs) == doctest::Approx(4.0).epsilon(1e-13));
      CHECK(one_bfs.dot(mb * one_bfs) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(one_bfs.dot(r * one_bfs) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("symmetric forms are exactly symmetric") {
    auto grid = build_grid(4);
    auto bfs = dof_map_bfs(grid);
    auto dg = dof_map_dg(grid);
    CHECK(asymmetry_norm(assemble_mass_dg(grid, dg)) == 0.0);
    CHECK(asymmetry_norm(assemble_boundary_mass(grid, bfs)) == 0.0);
    CHECK(asymmetry_norm(assemble_mass_bfs(grid, bfs)) == 0.0);
    CHECK(asymmetry_norm(assemble_regularity_form(grid, bfs)) == 0.0);
    CHECK(asymmetry_norm(assemble_regularity_form(grid, bfs, StateOperator::laplace)) == 0.0);
  }

  TEST_CASE("DG mass is block diagonal and SPD") {
    auto grid = build_grid(3);
    auto dg = dof_map_dg(grid);
    auto m = assemble_mass_dg(grid, dg);
    for (Index r = 0; r < m.outerSize(); r++) {
      for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
        CHECK(it.row() / 16 == it.col() / 16);
      }
    }
    Eigen::SimplicialLLT<SparseMatrix> llt(m);
    CHECK(llt.info() == Eigen::Success);
  }

  TEST_CASE("state operator maps constants to constants") {
    auto grid = build_grid(4);
    auto bfs = dof_map_bfs(grid);
    auto dg = dof_map_dg(grid);
    auto a = assemble_state_operator(grid, bfs, dg);
    auto m = assemble_mass_dg(grid, dg);
    Vector lhs = a * bfs_constant(bfs, 1.0);
    Vector rhs = m * dg_ones(dg);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-14);
    auto al = assemble_state_operator(grid, bfs, dg, StateOperator::laplace);
    CHECK((al * bfs_constant(bfs, 1.0)).cwiseAbs().maxCoeff() <= 1e-13);
  }

  TEST_CASE("regularity form equals A^T M^-1 A") {
    for (auto op : {StateOperator::helmholtz, StateOperator::laplace}) {
      auto grid = build_grid(8);
      auto bfs = dof_map_bfs(grid);
      auto dg = dof_map_dg(grid);
      auto a = assemble_state_operator(grid, bfs, dg, op);
      auto m = assemble_mass_dg(grid, dg);
      auto r = assemble_regularity_form(grid, bfs, op);
      Eigen::SimplicialLLT<SparseMatrix> llt(m);
      DenseMatrix ad = to_dense(a);
      DenseMatrix product = ad.transpose() * llt.solve(ad);
      DenseMatrix rd = to_dense(r);
      CHECK((product - rd).norm() / rd.norm() <= 1e-10);
    }
  }

  TEST_CASE("compatibility: the state operator of a bicubic is reproduced by the DG space") {
    auto grid = build_grid(4);
    auto bfs = dof_map_bfs(grid);
    auto dg = dof_map_dg(grid);
    Vector u = interpolate_bfs(grid, bfs, smooth_hermite);
    auto a = assemble_state_operator(grid, bfs, dg);
    auto m = assemble_mass_dg(grid, dg);
    Eigen::SimplicialLLT<SparseMatrix> llt(m);
    Vector lu = llt.solve(a * u);
    // (1 - Lap)(g(x) g(y) + 1) with g'' = 6 - 12x.
    auto exact = [](double x, double y) {
      double gpp_x = 6.0 - 12.0 * x, gpp_y = 6.0 - 12.0 * y;
      return g(x) * g(y) + 1.0 - gpp_x * g(y) - g(x) * gpp_y;
    };
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 50; k++) {
      double x = unit(rng), y = unit(rng);
      CHECK(evaluate_dg(grid, dg, lu, x, y) == doctest::Approx(exact(x, y)).epsilon(1e-12));
    }
  }

  TEST_CASE("BFS interpolation and evaluation of a bicubic") {
    auto grid = build_grid(3);
    auto bfs = dof_map_bfs(grid);
    Vector u = interpolate_bfs(grid, bfs, smooth_hermite);
    CHECK(u.size() == bfs.n_free());
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 50; k++) {
      double x = unit(rng), y = unit(rng);
      auto s = evaluate_bfs(grid, bfs, u, x, y);
      auto e = smooth_hermite(x, y);
      CHECK(s.value == doctest::Approx(e[0]).epsilon(1e-13));
      CHECK(s.dx == doctest::Approx(e[1]).epsilon(1e-12));
      CHECK(s.dy == doctest::Approx(e[2]).epsilon(1e-12));
      CHECK(s.dxy == doctest::Approx(e[3]).epsilon(1e-12));
    }
  }

  TEST_CASE("DG projection reproduces bicubics") {
    auto grid = build_grid(2);
    auto dg = dof_map_dg(grid);
    auto f = [](double x, double y) { return x * x * x * y * y - 2.0 * x * y + 0.5; };
    Vector c = project_dg(grid, dg, f);
    for (double x : {0.1, 0.37, 0.5, 0.92}) {
      for (double y : {0.05, 0.6, 0.99}) {
        CHECK(evaluate_dg(grid, dg, c, x, y) == doctest::Approx(f(x, y)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("prolongation is the exact embedding") {
    auto coarse = build_grid(2);
    auto fine = build_grid(4);
    auto cm = dof_map_bfs(coarse);
    auto fm = dof_map_bfs(fine);
    auto p = assemble_prolongation(coarse, cm, fine, fm);
    CHECK(p.rows() == fm.n_free());
    CHECK(p.cols() == cm.n_free());
    Vector uc = interpolate_bfs(coarse, cm, smooth_hermite);
    Vector uf = interpolate_bfs(fine, fm, smooth_hermite);
    CHECK((p * uc - uf).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((p * bfs_constant(cm, 1.0) - bfs_constant(fm, 1.0)).cwiseAbs().maxCoeff() <= 1e-14);
  }

  TEST_CASE("Galerkin property of the regularity form") {
    auto coarse = build_grid(2);
    auto fine = build_grid(4);
    auto cm = dof_map_bfs(coarse);
    auto fm = dof_map_bfs(fine);
    auto p = assemble_prolongation(coarse, cm, fine, fm);
    DenseMatrix rc = to_dense(assemble_regularity_form(coarse, cm));
    DenseMatrix pd = to_dense(p);
    DenseMatrix galerkin = pd.transpose() * to_dense(assemble_regularity_form(fine, fm)) * pd;
    CHECK((galerkin - rc).norm() / rc.norm() <= 1e-12);
    DenseMatrix kc = to_dense(assemble_boundary_mass(coarse, cm));
    DenseMatrix kg = pd.transpose() * to_dense(assemble_boundary_mass(fine, fm)) * pd;
    CHECK((kg - kc).norm() / kc.norm() <= 1e-12);
  }

  TEST_CASE("observation right-hand sides") {
    auto grid = build_grid(4);
    auto bfs = dof_map_bfs(grid);
    auto md = assemble_boundary_mass(grid, bfs);
    Vector one = bfs_constant(bfs, 1.0);
    Vector rhs = assemble_observation_rhs(grid, bfs, [](double, double) { return 1.0; });
    CHECK((rhs - md * one).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(rhs.dot(one) == doctest::Approx(4.0));
    // Data x integrates to 2 over the boundary.
    Vector rx = assemble_observation_rhs(grid, bfs, [](double x, double) { return x; });
    CHECK(rx.dot(one) == doctest::Approx(2.0));
    Vector rv = assemble_volume_rhs_bfs(grid, bfs, [](double x, double y) { return x * y; });
    CHECK(rv.dot(one) == doctest::Approx(0.25));
  }
}
