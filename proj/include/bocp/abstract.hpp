#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kkt.hpp"
#include "types.hpp"

namespace bocp {

// Generic saddle-point data: control/dual space W (mass), state space U
// (observation K on U), constraint A: U -> W'. All dense.
struct OperatorTriple {
  DenseMatrix mass;         // n_w x n_w, SPD
  DenseMatrix observation;  // n_u x n_u, symmetric PSD
  DenseMatrix state;        // n_w x n_u
  double alpha = 1.0;
  std::optional<DenseMatrix> observation_map;  // T with K = T^T T, when known
  std::optional<DenseMatrix> regularity;       // replaces A^T M^{-1} A when set

  Index n_control() const { return mass.rows(); }
  Index n_state() const { return observation.rows(); }
  Index size() const { return 2 * n_control() + n_state(); }
};

// A^T M^{-1} A, or the stored override.
DenseMatrix regularity_of(const OperatorTriple& triple);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;  // the measured quantity (smallest eigenvalue etc.)
  std::string detail;
};

struct AssumptionVerdict {
  std::vector<AssumptionCheck> checks;

  bool ok() const;
  std::vector<std::string> failures() const;
};

// B1: M SPD. B2: K + R SPD. B3: K symmetric PSD. A1: smallest nonzero
// singular value of A (always passes unless A = 0). A2: K definite on ker A.
// tol is relative to the largest eigenvalue of the matrix under test.
AssumptionVerdict validate_assumptions(const OperatorTriple& triple, double tol = 1e-10);

// [[aM, 0, M], [0, K, A^T], [M, A, 0]]
DenseMatrix system_matrix(const OperatorTriple& triple);

struct GeneralPreconditioner {
  DenseMatrix riesz;    // diag(aM, aR + K, M/a)
  DenseMatrix inverse;  // the preconditioner itself

  Vector apply(const Vector& x) const { return inverse * x; }
};

// Throws std::runtime_error when a diagonal block is not SPD.
GeneralPreconditioner build_general_preconditioner(const OperatorTriple& triple);

struct StabilityReport {
  double inf_sup = 0.0;
  double coercivity = 0.0;
  double boundedness = 0.0;
};

StabilityReport measure_stability(const OperatorTriple& triple);

// Eigenvalues of system_matrix x = lambda riesz x, sorted.
std::vector<double> preconditioned_spectrum(const OperatorTriple& triple);

struct InstanceDims {
  Index control = 3;      // dim W
  Index state = 3;        // dim U
  Index observation = 3;  // rows of T
};

// Reproducible random triple satisfying B1-B3: M = F F^T + I/10, A with
// full column rank when control >= state, K = T^T T with exactly
// ker_k_dim-dimensional kernel (needs ker_k_dim < state and
// observation >= state - ker_k_dim).
OperatorTriple random_instance(std::uint64_t seed, const InstanceDims& dims, Index ker_k_dim,
                               double alpha = 1.0);

// Dense triple of an assembled problem. Variant::boundary_obs,
// Variant::laplace_state and Variant::full_obs correspond to the boundary
// observation, Laplace state and full observation examples. The regularity
// override holds the assembled bilinear form.
OperatorTriple triple_from_blocks(const KktBlocks& blocks, double alpha, bool use_assembled_regularity = true);
OperatorTriple example_triple(Variant variant, Index n_cells_per_side, double alpha);

// Writes <prefix>M.mtx, <prefix>K.mtx, <prefix>A.mtx.
void export_triple(const OperatorTriple& triple, const std::string& prefix);

}  // namespace bocp
