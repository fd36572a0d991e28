#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include <bocp/spectral.hpp>

using namespace bocp;

TEST_SUITE("spectral") {
  TEST_CASE("polynomial roots") {
    auto t = theorem_intervals();
    CHECK(std::abs(poly_q(t.q1)) <= 1e-12);
    CHECK(std::abs(poly_q(t.q2)) <= 1e-12);
    CHECK(std::abs(poly_r(t.r1)) <= 1e-12);
    CHECK(std::abs(poly_r(t.r2)) <= 1e-12);
    CHECK(std::abs(poly_r(t.r3)) <= 1e-12);
    CHECK(t.q1 == doctest::Approx(-0.6180339887).epsilon(1e-10));
    CHECK(t.q2 == doctest::Approx(1.6180339887).epsilon(1e-10));
    CHECK(t.r1 == doctest::Approx(-1.2469796037).epsilon(1e-10));
    CHECK(t.r2 == doctest::Approx(0.4450418679).epsilon(1e-10));
    CHECK(t.r3 == doctest::Approx(1.8019377358).epsilon(1e-10));
    CHECK(t.kappa_bound() == doctest::Approx(4.0489173395).epsilon(1e-10));
  }

  TEST_CASE("expanded cubic matches its definition") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int k = 0; k < 100; k++) {
      double x = dist(rng);
      CHECK(poly_r_expanded(x) == doctest::Approx(poly_r(x)).epsilon(1e-13).scale(1.0));
    }
  }

  TEST_CASE("interval ordering") {
    auto t = theorem_intervals();
    CHECK(t.r1 < t.q1);
    CHECK(t.q1 < 0.0);
    CHECK(0.0 < t.r2);
    CHECK(t.r2 < 1.0);
    CHECK(1.0 < t.q2);
    CHECK(t.q2 < t.r3);
  }

  TEST_CASE("containment of single values") {
    auto t = theorem_intervals();
    CHECK(t.locate(1.0, 0.0) == 1);
    CHECK(t.locate(0.0, 0.0) == -1);
    CHECK(t.locate(-1.0, 0.0) == 0);
    CHECK(t.locate(1.7, 0.0) == 2);
    auto ok = check_containment(std::vector<double>{1.0, t.r1, t.r3}, t, 0.0);
    CHECK(ok.contained);
    auto bad = check_containment(std::vector<double>{1.0, 0.0}, t, 1e-8);
    CHECK_FALSE(bad.contained);
    REQUIRE(bad.violators.size() == 1);
    CHECK(bad.violators[0] == 0.0);
  }

  TEST_CASE("scalar instance") {
    // M = K = A = 1, alpha = 1: R = 1, Riesz map diag(1, 2, 1).
    DenseMatrix a(3, 3);
    a << 1, 0, 1, 0, 1, 1, 1, 1, 0;
    DenseMatrix b = Vector(Vector::Ones(3)).asDiagonal();
    b(1, 1) = 2.0;
    auto ev = dense_generalized_eigenvalues(a, b);
    REQUIRE(ev.size() == 3);
    // Each eigenvalue must make A - l B singular.
    for (double l : ev) {
      CHECK(std::abs((a - l * b).determinant()) <= 1e-12);
    }
    auto t = theorem_intervals();
    CHECK(check_containment(ev, t, 1e-12).contained);
    auto report = make_report(1.0, ev);
    CHECK(report.kappa >= 1.0);
    CHECK(report.kappa <= t.kappa_bound() + 1e-12);
  }

  TEST_CASE("dense eigensolver errors") {
    DenseMatrix a = DenseMatrix::Identity(2, 2);
    DenseMatrix b = -DenseMatrix::Identity(2, 2);
    CHECK_THROWS_AS(dense_generalized_eigenvalues(a, b), std::runtime_error);
    CHECK_THROWS_AS(dense_generalized_eigenvalues(a, DenseMatrix::Identity(3, 3)), std::invalid_argument);
  }

  TEST_CASE("concrete spectra") {
    auto d = discretize(8);
    auto t = theorem_intervals();
    for (double alpha : {1.0, 1e-6}) {
      auto kkt = build_kkt(d.blocks, alpha, Vector::Zero(d.blocks->n_state()));
      ExactPreconditioner b(d.blocks, alpha);
      SpectrumOptions full;
      full.mode = SpectrumMode::full;
      SpectrumOptions deflated;
      deflated.mode = SpectrumMode::deflated;
      auto rf = generalized_spectrum(kkt, b, full);
      auto rd = generalized_spectrum(kkt, b, deflated);
      REQUIRE(rf.eigenvalues.size() == rd.eigenvalues.size());
      REQUIRE(static_cast<Index>(rf.eigenvalues.size()) == kkt.size());
      for (std::size_t i = 0; i < rf.eigenvalues.size(); i++) {
        CHECK(rf.eigenvalues[i] == doctest::Approx(rd.eigenvalues[i]).epsilon(1e-8).scale(1.0));
      }
      auto verdict = check_containment(rf, t, 1e-8);
      CHECK(verdict.contained);
      CHECK(rf.containment.size() == rf.eigenvalues.size());
      CHECK(rf.min_abs >= 0.44);
      CHECK(rf.min_abs <= 0.45);
      CHECK(rf.max_abs >= 1.79);
      CHECK(rf.max_abs <= 1.81);
      CHECK(rf.kappa <= t.kappa_bound() + 1e-6);
    }
  }

  TEST_CASE("dimension guard and extremes mode") {
    auto d = discretize(4);
    auto kkt = build_kkt(d.blocks, 1e-2, Vector::Zero(d.blocks->n_state()));
    ExactPreconditioner b(d.blocks, 1e-2);
    SpectrumOptions small;
    small.dense_limit = 10;
    CHECK_THROWS_AS(generalized_spectrum(kkt, b, small), std::invalid_argument);
    small.mode = SpectrumMode::extremes;
    auto r = generalized_spectrum(kkt, b, small);
    CHECK(r.eigenvalues.empty());
    CHECK(r.kappa == doctest::Approx(4.05).epsilon(0.02));
    auto t = theorem_intervals();
    CHECK(check_containment(r, t, 1e-6).contained);
    ExactPreconditioner other(d.blocks, 1.0);
    CHECK_THROWS_AS(generalized_spectrum(kkt, other), std::invalid_argument);
  }

  TEST_CASE("export formats") {
    auto report = make_report(1e-3, {1.7, -0.8, 0.5});
    report.h = 0.125;
    auto t = theorem_intervals();
    auto verdict = check_containment(report, t, 1e-8);
    std::ostringstream os;
    write_spectrum_csv(os, report);
    CHECK(os.str().rfind("index,eigenvalue\n0,-0.8", 0) == 0);
    auto j = spectrum_summary(report, t, verdict);
    CHECK(j["n_eigenvalues"] == 3);
    CHECK(j["h"] == 0.125);
    CHECK(j["contained"] == true);
    CHECK(j["interval_counts"][1] == 1);
  }
}
