#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kkt.hpp"
#include "mesh.hpp"
#include "sparse.hpp"
#include "types.hpp"

namespace bocp {

struct SolverReport {
  Index iterations = 0;
  // (r_k, B r_k) / (r_0, B r_0), starting with 1 at k = 0.
  std::vector<double> residual_history;
  bool converged = false;
  std::optional<double> cond_estimate;
  Vector solution;
  std::string message;
};

// Preconditioned MINRES for a self-adjoint op and SPD precond. Stops when
// (r_k, B r_k) / (r_0, B r_0) <= eps.
SolverReport minres(const LinearOperator& op, const LinearOperator& precond, const Vector& b,
                    const Vector& x0, double eps, Index max_iter);

// Uniform(-1, 1) vector from a fixed-seed generator.
Vector random_vector(Index n, std::uint64_t seed);

// `sweeps` symmetric (forward then backward) point Gauss-Seidel sweeps on
// S x = b from x = 0.
LinearOperator symmetric_gauss_seidel(std::shared_ptr<const SparseMatrix> s, int sweeps);

// Gauss-Seidel over contiguous DOF blocks, with exact solves of the
// diagonal blocks.
class BlockGaussSeidel {
 public:
  // block_starts holds the first index of each block plus a final entry
  // equal to the matrix size.
  BlockGaussSeidel(std::shared_ptr<const SparseMatrix> s, std::vector<Index> block_starts);

  void forward(const Vector& b, Vector& x) const;
  void backward(const Vector& b, Vector& x) const;
  void symmetric(const Vector& b, Vector& x) const {
    forward(b, x);
    backward(b, x);
  }

  const SparseMatrix& matrix() const { return *s_; }

 private:
  void relax_block(std::size_t k, const Vector& b, Vector& x) const;

  std::shared_ptr<const SparseMatrix> s_;
  std::vector<Index> starts_;
  std::vector<DenseMatrix> inverses_;
};

// Blocks of all free DOFs attached to one vertex.
std::vector<Index> vertex_blocks(const DofMap& bfs);

struct MultigridConfig {
  int n_vcycles = 1;
  int pre_sweeps = 1;   // symmetric block Gauss-Seidel sweeps
  int post_sweeps = 1;
};

// Geometric V-cycle; level 0 is the coarsest and is solved directly.
class Multigrid {
 public:
  struct Level {
    std::shared_ptr<const SparseMatrix> matrix;
    std::vector<Index> blocks;
    SparseMatrix prolongation;  // from the previous (coarser) level; empty on level 0
  };

  Multigrid(std::vector<Level> levels, MultigridConfig config);

  Index size() const;
  Index n_levels() const { return static_cast<Index>(levels_.size()); }
  // Finest-level operator.
  const SparseMatrix& matrix() const { return *levels_.back().matrix; }

  Vector apply(const Vector& b) const;
  LinearOperator op() const;

 private:
  struct CoarseSolver;
  void vcycle(std::size_t level, const Vector& b, Vector& x) const;

  std::vector<Level> levels_;
  std::vector<BlockGaussSeidel> smoothers_;
  std::shared_ptr<const CoarseSolver> coarse_;
  MultigridConfig config_;
};

// Levels with 8x8 coarsest cells (or a single level when the grid is
// coarser) for the state block aR + K of the given variant.
MeshHierarchy multigrid_hierarchy(Index n_cells_per_side, Index coarsest = 8);

Multigrid build_state_multigrid(const MeshHierarchy& hierarchy, double alpha, Variant variant,
                                MultigridConfig config = {});

// diag(control, state, dual) as one operator on KKT vectors.
LinearOperator block_preconditioner(LinearOperator control, LinearOperator state, LinearOperator dual);

// GS(aM, gs_sweeps) + state approximation + GS(M/a, gs_sweeps).
LinearOperator build_approx_preconditioner(const KktSystem& kkt, LinearOperator state_approx,
                                           int gs_sweeps = 2);

LinearOperator build_approx_preconditioner(const KktSystem& kkt, const MeshHierarchy& hierarchy,
                                           Variant variant, MultigridConfig config = {},
                                           int gs_sweeps = 2);

struct ConditionEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
  Index iterations = 0;
  bool converged = false;
};

struct ConditionOptions {
  double stagnation_tol = 1e-6;
  Index max_iter = 200;
  std::uint64_t seed = 12345;
};

// Extreme eigenvalues of precond * op (both SPD) from the Lanczos
// tridiagonal of preconditioned CG.
ConditionEstimate estimate_condition_pcg(const LinearOperator& op, const LinearOperator& precond,
                                         const ConditionOptions& options = {});

// kappa(precond * op) for self-adjoint indefinite op: CG on the normal
// operator op * precond * op, preconditioned with precond, estimates the
// extreme eigenvalues of (precond * op)^2. lambda_min/lambda_max hold
// min |lambda| and max |lambda|.
ConditionEstimate estimate_condition_cg_normal(const LinearOperator& op, const LinearOperator& precond,
                                               const ConditionOptions& options = {});

}  // namespace bocp
