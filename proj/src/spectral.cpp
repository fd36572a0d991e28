#include <bocp/spectral.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bocp {

double poly_p(double x) { return 1.0 - x; }
double poly_q(double x) { return 1.0 + x * poly_p(x); }
double poly_r(double x) { return poly_p(x) - x * poly_q(x); }
double poly_r_expanded(double x) { return ((x - 1.0) * x - 2.0) * x + 1.0; }

namespace {

// Newton steps kept inside a sign-change bracket, falling back to bisection.
double bracketed_root(double lo, double hi) {
  auto f = [](double x) { return poly_r_expanded(x); };
  auto df = [](double x) { return (3.0 * x - 2.0) * x - 2.0; };
  double flo = f(lo);
  if (flo * f(hi) > 0.0) {
    throw std::logic_error("root bracket without sign change");
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; it++) {
    double fx = f(x);
    if (fx == 0.0) {
      return x;
    }
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    double step = fx / df(x);
    double next = x - step;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace

std::array<std::array<double, 2>, 3> TheoremIntervals::intervals() const {
  return {{{r1, q1}, {r2, 1.0}, {q2, r3}}};
}

int TheoremIntervals::locate(double x, double tol) const {
  auto iv = intervals();
  for (int k = 0; k < 3; k++) {
    if (x >= iv[k][0] - tol && x <= iv[k][1] + tol) {
      return k;
    }
  }
  return -1;
}

TheoremIntervals theorem_intervals() {
  TheoremIntervals t;
  double s = std::sqrt(5.0);
  t.q1 = 0.5 * (1.0 - s);
  t.q2 = 0.5 * (1.0 + s);
  // r(-2) = -7, r(0) = 1, r(1) = -1, r(2) = 1.
  t.r1 = bracketed_root(-2.0, 0.0);
  t.r2 = bracketed_root(0.0, 1.0);
  t.r3 = bracketed_root(1.0, 2.0);
  return t;
}

std::vector<double> dense_generalized_eigenvalues(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || b.cols() != a.cols()) {
    throw std::invalid_argument("generalized eigenproblem: dimension mismatch");
  }
  Eigen::LLT<DenseMatrix> llt(b);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("generalized eigenproblem: right-hand operator is not SPD");
  }
  DenseMatrix half = llt.matrixL().solve(a);
  DenseMatrix c = llt.matrixL().solve(half.transpose());
  c = 0.5 * (c + c.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(c, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigensolver failed (dim " << a.rows() << ", ||A||_F = " << a.norm()
        << ", ||B||_F = " << b.norm() << ")";
    throw std::runtime_error(msg.str());
  }
  const auto& v = eig.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

SpectrumReport make_report(double alpha, std::vector<double> eigenvalues) {
  SpectrumReport report;
  report.alpha = alpha;
  std::sort(eigenvalues.begin(), eigenvalues.end());
  report.eigenvalues = std::move(eigenvalues);
  if (!report.eigenvalues.empty()) {
    report.min_abs = std::numeric_limits<double>::infinity();
    for (double v : report.eigenvalues) {
      report.min_abs = std::min(report.min_abs, std::abs(v));
      report.max_abs = std::max(report.max_abs, std::abs(v));
    }
    report.kappa = report.max_abs / report.min_abs;
  }
  return report;
}

SpectrumReport generalized_spectrum(const KktSystem& kkt, const ExactPreconditioner& precond,
                                    const SpectrumOptions& options) {
  auto n = kkt.size();
  if (precond.size() != n || precond.alpha() != kkt.alpha()) {
    throw std::invalid_argument("preconditioner does not match the system");
  }
  auto mode = options.mode;
  if (mode == SpectrumMode::automatic) {
    mode = n <= options.full_limit ? SpectrumMode::full : SpectrumMode::deflated;
  }
  if (mode != SpectrumMode::extremes && n > options.dense_limit) {
    std::ostringstream msg;
    msg << "dense spectrum refused: dimension " << n << " exceeds " << options.dense_limit;
    throw std::invalid_argument(msg.str());
  }

  switch (mode) {
    case SpectrumMode::full: {
      // Congruence with diag(a^{-1/2}, 1, a^{1/2}) keeps alpha out of the
      // control and dual blocks of both operators.
      const auto& l = kkt.layout();
      const auto& b = kkt.blocks();
      double alpha = kkt.alpha();
      double root = std::sqrt(alpha);
      DenseMatrix mass = to_dense(b.mass);
      DenseMatrix state = to_dense(b.state);
      DenseMatrix op = DenseMatrix::Zero(n, n);
      op.block(0, 0, l.n_f, l.n_f) = mass;
      op.block(0, l.w_offset(), l.n_f, l.n_w) = mass;
      op.block(l.u_offset(), l.u_offset(), l.n_u, l.n_u) = to_dense(b.observation);
      op.block(l.u_offset(), l.w_offset(), l.n_u, l.n_w) = root * state.transpose();
      op.block(l.w_offset(), 0, l.n_w, l.n_f) = mass;
      op.block(l.w_offset(), l.u_offset(), l.n_w, l.n_u) = root * state;
      DenseMatrix riesz = DenseMatrix::Zero(n, n);
      riesz.block(0, 0, l.n_f, l.n_f) = mass;
      riesz.block(l.u_offset(), l.u_offset(), l.n_u, l.n_u) = to_dense(precond.state_block());
      riesz.block(l.w_offset(), l.w_offset(), l.n_w, l.n_w) = mass;
      return make_report(alpha, dense_generalized_eigenvalues(op, riesz));
    }
    case SpectrumMode::deflated:
      return make_report(kkt.alpha(), weighted_spectrum(weighted_coordinates(kkt)));
    case SpectrumMode::extremes: {
      auto est = estimate_condition_cg_normal(kkt.op(), precond.op(), options.iterative);
      SpectrumReport report;
      report.alpha = kkt.alpha();
      report.min_abs = est.lambda_min;
      report.max_abs = est.lambda_max;
      report.kappa = est.kappa;
      return report;
    }
    case SpectrumMode::automatic:
      break;
  }
  throw std::logic_error("unreachable spectrum mode");
}

ContainmentVerdict check_containment(const std::vector<double>& eigenvalues,
                                     const TheoremIntervals& intervals, double rel_tol) {
  ContainmentVerdict verdict;
  double scale = 0.0;
  for (double v : eigenvalues) {
    scale = std::max(scale, std::abs(v));
  }
  verdict.tolerance = rel_tol * scale;
  for (double v : eigenvalues) {
    if (intervals.locate(v, verdict.tolerance) < 0) {
      verdict.contained = false;
      verdict.violators.push_back(v);
    }
  }
  return verdict;
}

ContainmentVerdict check_containment(SpectrumReport& report, const TheoremIntervals& intervals,
                                     double rel_tol) {
  ContainmentVerdict verdict;
  verdict.tolerance = rel_tol * report.max_abs;
  report.containment.clear();
  if (report.eigenvalues.empty()) {
    if (report.min_abs < intervals.r2 - verdict.tolerance) {
      verdict.contained = false;
      verdict.violators.push_back(report.min_abs);
    }
    if (report.max_abs > intervals.r3 + verdict.tolerance) {
      verdict.contained = false;
      verdict.violators.push_back(report.max_abs);
    }
    return verdict;
  }
  for (double v : report.eigenvalues) {
    int k = intervals.locate(v, verdict.tolerance);
    report.containment.push_back(k);
    if (k < 0) {
      verdict.contained = false;
      verdict.violators.push_back(v);
    }
  }
  return verdict;
}

void write_spectrum_csv(std::ostream& os, const SpectrumReport& report) {
  auto old = os.precision(17);
  os << "index,eigenvalue\n";
  for (std::size_t i = 0; i < report.eigenvalues.size(); i++) {
    os << i << ',' << report.eigenvalues[i] << '\n';
  }
  os.precision(old);
}

nlohmann::json spectrum_summary(const SpectrumReport& report, const TheoremIntervals& intervals,
                                const ContainmentVerdict& verdict) {
  nlohmann::json j;
  j["alpha"] = report.alpha;
  if (std::isfinite(report.h)) {
    j["h"] = report.h;
  }
  j["n_eigenvalues"] = report.eigenvalues.size();
  j["min_abs"] = report.min_abs;
  j["max_abs"] = report.max_abs;
  j["kappa"] = report.kappa;
  j["kappa_bound"] = intervals.kappa_bound();
  j["contained"] = verdict.contained;
  j["tolerance"] = verdict.tolerance;
  j["violators"] = verdict.violators;
  std::array<std::size_t, 3> counts{};
  for (int k : report.containment) {
    if (k >= 0) {
      counts[k]++;
    }
  }
  j["interval_counts"] = counts;
  return j;
}

}  // namespace bocp
