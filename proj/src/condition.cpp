#include <bocp/solvers.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace bocp {

namespace {

struct ExtremeEigenvalues {
  double min = 0.0;
  double max = 0.0;
};

ExtremeEigenvalues tridiagonal_extremes(const std::vector<double>& diag, const std::vector<double>& off) {
  auto m = static_cast<Index>(diag.size());
  Vector d = Eigen::Map<const Vector>(diag.data(), m);
  Vector e = m > 1 ? Vector(Eigen::Map<const Vector>(off.data(), m - 1)) : Vector();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver;
  solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  const auto& values = solver.eigenvalues();
  return {values.minCoeff(), values.maxCoeff()};
}

// PCG on op x = b from x = 0; the CG coefficients give the Lanczos
// tridiagonal of precond * op.
ConditionEstimate pcg_lanczos(const LinearOperator& op, const LinearOperator& precond,
                              const ConditionOptions& options) {
  auto n = op.size();
  if (precond.size() != n) {
    throw std::invalid_argument("condition estimate: dimension mismatch");
  }
  Vector b = random_vector(n, options.seed);
  Vector r = b;
  Vector z = precond(r);
  Vector p = z;
  double rz = r.dot(z);

  std::vector<double> diag;
  std::vector<double> off;
  double prev_alpha = 0.0;
  double prev_beta = 0.0;
  double prev_kappa = 0.0;
  int stagnant = 0;

  ConditionEstimate estimate;
  Vector q(n);
  for (Index j = 0; j < options.max_iter; j++) {
    q = op(p);
    double pq = p.dot(q);
    if (!(pq > 0.0) || !(rz > 0.0)) {
      break;
    }
    double alpha = rz / pq;
    double t = 1.0 / alpha;
    if (j > 0) {
      t += prev_beta / prev_alpha;
      off.push_back(std::sqrt(prev_beta) / prev_alpha);
    }
    diag.push_back(t);

    auto ext = tridiagonal_extremes(diag, off);
    estimate.lambda_min = ext.min;
    estimate.lambda_max = ext.max;
    estimate.kappa = ext.max / ext.min;
    estimate.iterations = j + 1;

    if (j > 0 && std::abs(estimate.kappa - prev_kappa) < options.stagnation_tol * estimate.kappa) {
      if (++stagnant >= 2) {
        estimate.converged = true;
        break;
      }
    } else {
      stagnant = 0;
    }
    prev_kappa = estimate.kappa;

    r -= alpha * q;
    z = precond(r);
    double rz_next = r.dot(z);
    double beta = rz_next / rz;
    if (rz_next <= 0.0 || !std::isfinite(beta)) {
      // Krylov space exhausted; the tridiagonal is exact.
      estimate.converged = true;
      break;
    }
    p = z + beta * p;
    rz = rz_next;
    prev_alpha = alpha;
    prev_beta = beta;
  }
  return estimate;
}

}  // namespace

ConditionEstimate estimate_condition_pcg(const LinearOperator& op, const LinearOperator& precond,
                                         const ConditionOptions& options) {
  return pcg_lanczos(op, precond, options);
}

ConditionEstimate estimate_condition_cg_normal(const LinearOperator& op, const LinearOperator& precond,
                                               const ConditionOptions& options) {
  if (precond.size() != op.size()) {
    throw std::invalid_argument("condition estimate: dimension mismatch");
  }
  LinearOperator normal(op.size(), [&op, &precond](const Vector& x, Vector& y) {
    Vector ax = op(x);
    Vector bax = precond(ax);
    y = op(bax);
  });
  auto squared = pcg_lanczos(normal, precond, options);
  ConditionEstimate estimate = squared;
  estimate.lambda_min = std::sqrt(std::max(squared.lambda_min, 0.0));
  estimate.lambda_max = std::sqrt(std::max(squared.lambda_max, 0.0));
  estimate.kappa = std::sqrt(squared.kappa);
  return estimate;
}

}  // namespace bocp
