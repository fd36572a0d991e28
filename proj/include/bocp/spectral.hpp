#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <vector>

#include <json.hpp>

#include "kkt.hpp"
#include "solvers.hpp"
#include "types.hpp"

namespace bocp {

// Polynomials bounding the spectrum of the preconditioned system:
//   p(x) = 1 - x,  q(x) = 1 + x p(x),  r(x) = p(x) - x q(x).
double poly_p(double x);
double poly_q(double x);
double poly_r(double x);
// r in expanded form, x^3 - x^2 - 2x + 1.
double poly_r_expanded(double x);

struct TheoremIntervals {
  double q1 = 0.0, q2 = 0.0;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;

  // [r1, q1], [r2, 1], [q2, r3]
  std::array<std::array<double, 2>, 3> intervals() const;
  double kappa_bound() const { return r3 / r2; }

  // Index (0, 1, 2) of the interval containing x within tol, or -1.
  int locate(double x, double tol) const;
};

TheoremIntervals theorem_intervals();

enum class SpectrumMode {
  automatic,  // full if small, else deflated
  full,       // dense generalized eigenproblem on the monolithic operators
  deflated,   // dense eigenproblem in weighted coordinates after deflation
  extremes    // min |lambda| and max |lambda| only, iteratively
};

struct SpectrumOptions {
  SpectrumMode mode = SpectrumMode::automatic;
  Index full_limit = 2500;     // automatic picks full up to this dimension
  Index dense_limit = 20000;   // refuse dense paths above this dimension
  ConditionOptions iterative;  // for extremes mode
};

struct SpectrumReport {
  double alpha = 0.0;
  double h = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> eigenvalues;  // sorted; empty in extremes mode
  double min_abs = 0.0;
  double max_abs = 0.0;
  double kappa = 0.0;
  // Per-eigenvalue interval index from check_containment (-1 = outside).
  std::vector<int> containment;
};

// Eigenvalues of a x = lambda b x with b SPD, via b = L L^T and
// L^{-1} a L^{-T}. Throws std::runtime_error when b is not SPD.
std::vector<double> dense_generalized_eigenvalues(const DenseMatrix& a, const DenseMatrix& b);

SpectrumReport generalized_spectrum(const KktSystem& kkt, const ExactPreconditioner& precond,
                                    const SpectrumOptions& options = {});

// Builds a report from a list of eigenvalues (sorted on output).
SpectrumReport make_report(double alpha, std::vector<double> eigenvalues);

struct ContainmentVerdict {
  bool contained = true;
  double tolerance = 0.0;  // absolute
  std::vector<double> violators;
};

// Every eigenvalue within rel_tol * max|lambda| of the interval union. In
// extremes mode only min|lambda| >= r2 and max|lambda| <= r3 are checked.
ContainmentVerdict check_containment(SpectrumReport& report, const TheoremIntervals& intervals,
                                     double rel_tol = 1e-8);
ContainmentVerdict check_containment(const std::vector<double>& eigenvalues,
                                     const TheoremIntervals& intervals, double rel_tol = 1e-8);

// index,eigenvalue
void write_spectrum_csv(std::ostream& os, const SpectrumReport& report);
nlohmann::json spectrum_summary(const SpectrumReport& report, const TheoremIntervals& intervals,
                                const ContainmentVerdict& verdict);

}  // namespace bocp
