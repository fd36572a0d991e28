#include <bocp/solvers.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace bocp {

Vector random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; i++) {
    v[i] = dist(rng);
  }
  return v;
}

SolverReport minres(const LinearOperator& op, const LinearOperator& precond, const Vector& b,
                    const Vector& x0, double eps, Index max_iter) {
  auto n = op.size();
  if (precond.size() != n || b.size() != n || x0.size() != n) {
    throw std::invalid_argument("minres: dimension mismatch");
  }

  SolverReport report;
  Vector x = x0;
  Vector r1 = b - op(x);
  Vector y = precond(r1);
  double beta1 = r1.dot(y);
  if (beta1 < 0.0 || !std::isfinite(beta1)) {
    throw std::runtime_error("minres: preconditioner is not positive definite");
  }
  beta1 = std::sqrt(beta1);
  report.residual_history.push_back(1.0);
  if (beta1 == 0.0) {
    report.converged = true;
    report.solution = x;
    return report;
  }

  Vector r2 = r1;
  Vector w = Vector::Zero(n);
  Vector w1 = Vector::Zero(n);
  Vector w2 = Vector::Zero(n);
  Vector v(n);

  double old_beta = 0.0;
  double beta = beta1;
  double dbar = 0.0;
  double epsln = 0.0;
  double phibar = beta1;
  double cs = -1.0;
  double sn = 0.0;

  for (Index k = 1; k <= max_iter; k++) {
    // Lanczos step in the preconditioner inner product.
    v = y / beta;
    y = op(v);
    if (k >= 2) {
      y -= (beta / old_beta) * r1;
    }
    double alpha = v.dot(y);
    y -= (alpha / beta) * r2;
    r1.swap(r2);
    r2 = y;
    y = precond(r2);
    old_beta = beta;
    double beta_sq = r2.dot(y);
    if (beta_sq < 0.0 || !std::isfinite(beta_sq)) {
      report.message = "breakdown: preconditioner is indefinite or produced NaN";
      break;
    }
    beta = std::sqrt(beta_sq);

    // Apply the previous rotation, then compute the next one.
    double old_eps = epsln;
    double delta = cs * dbar + sn * alpha;
    double gbar = sn * dbar - cs * alpha;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::epsilon());
    cs = gbar / gamma;
    sn = beta / gamma;
    double phi = cs * phibar;
    phibar = sn * phibar;

    w1.swap(w2);
    w2.swap(w);
    w = (v - old_eps * w1 - delta * w2) / gamma;
    x += phi * w;

    double ratio = (phibar / beta1) * (phibar / beta1);
    report.residual_history.push_back(ratio);
    report.iterations = k;
    if (!std::isfinite(ratio)) {
      report.message = "breakdown: non-finite residual";
      break;
    }
    if (ratio <= eps) {
      report.converged = true;
      break;
    }
    if (beta == 0.0) {
      // Invariant subspace found; the current iterate is exact.
      report.converged = true;
      break;
    }
  }

  if (!report.converged && report.message.empty()) {
    report.message = "maximum number of iterations reached";
  }
  report.solution = std::move(x);
  return report;
}

}  // namespace bocp
