#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "mesh.hpp"
#include "sparse.hpp"
#include "types.hpp"

namespace bocp {

// Problem variants sharing the same block structure:
//  boundary_obs  - boundary observation, state operator 1 - Laplacian
//  full_obs      - observation over all of Omega (observation block is the
//                  BFS mass matrix)
//  laplace_state - boundary observation, state operator -Laplacian
enum class Variant { boundary_obs, full_obs, laplace_state };

Variant parse_variant(const std::string& name);
std::string to_string(Variant variant);

// Assembled blocks of the optimality system on one grid.
struct KktBlocks {
  SparseMatrix mass;         // M, DG mass
  SparseMatrix observation;  // K: boundary mass, or BFS mass for full_obs
  SparseMatrix state;        // A, DG rows x free BFS columns
  SparseMatrix regularity;   // R, equal to A^T M^{-1} A on compatible spaces

  Index n_control() const { return mass.rows(); }
  Index n_state() const { return observation.rows(); }

  // Throws std::invalid_argument on inconsistent dimensions.
  void check_dimensions() const;
};

struct Discretization {
  Grid grid;
  DofMap bfs;
  DofMap dg;
  Variant variant = Variant::boundary_obs;
  std::shared_ptr<const KktBlocks> blocks;

  // Right-hand side of the state row for observation data d: boundary
  // integral for boundary variants, volume integral for full_obs.
  Vector observation_rhs(const ScalarField& d) const;
};

Discretization discretize(Index n_cells_per_side, Variant variant = Variant::boundary_obs);

// Block layout (f, u, w) of KKT vectors.
struct BlockLayout {
  Index n_f = 0;
  Index n_u = 0;
  Index n_w = 0;

  Index size() const { return n_f + n_u + n_w; }
  Index u_offset() const { return n_f; }
  Index w_offset() const { return n_f + n_u; }
};

class KktSystem {
 public:
  KktSystem(std::shared_ptr<const KktBlocks> blocks, double alpha, const Vector& observation_rhs);

  double alpha() const { return alpha_; }
  const KktBlocks& blocks() const { return *blocks_; }
  std::shared_ptr<const KktBlocks> shared_blocks() const { return blocks_; }
  const BlockLayout& layout() const { return layout_; }
  Index size() const { return layout_.size(); }

  // (0, observation_rhs, 0).
  const Vector& rhs() const { return rhs_; }

  void apply(const Vector& x, Vector& y) const;
  LinearOperator op() const;

  // Monolithic sparse matrix of the full symmetric operator.
  SparseMatrix monolithic() const;

 private:
  std::shared_ptr<const KktBlocks> blocks_;
  double alpha_;
  BlockLayout layout_;
  Vector rhs_;
};

KktSystem build_kkt(std::shared_ptr<const KktBlocks> blocks, double alpha, const Vector& observation_rhs);

// ||(f,u,w)||^2 = a f'Mf + u'(aR + K)u + w'Mw / a.
class WeightedNorm {
 public:
  WeightedNorm(std::shared_ptr<const KktBlocks> blocks, double alpha);

  double squared(const Vector& x) const;
  double operator()(const Vector& x) const { return std::sqrt(squared(x)); }

 private:
  std::shared_ptr<const KktBlocks> blocks_;
  double alpha_;
};

// diag(aM, aR + K, M/a)^{-1} applied through cached sparse Cholesky factors.
class ExactPreconditioner {
 public:
  ExactPreconditioner(std::shared_ptr<const KktBlocks> blocks, double alpha);

  double alpha() const { return alpha_; }
  Index size() const { return layout_.size(); }

  Vector apply(const Vector& x) const;
  // The block-diagonal matrix itself (the Riesz map of the weighted norms).
  Vector apply_inverse(const Vector& x) const;

  Vector solve_control(const Vector& b) const;  // (aM)^{-1} b
  Vector solve_state(const Vector& b) const;    // (aR + K)^{-1} b
  Vector solve_dual(const Vector& b) const;     // (M/a)^{-1} b

  const SparseMatrix& state_block() const;

  LinearOperator op() const;

 private:
  struct Factors;
  std::shared_ptr<const KktBlocks> blocks_;
  std::shared_ptr<const Factors> factors_;
  double alpha_;
  BlockLayout layout_;
};

// Least-squares realisation of the state equation A u = -M f in the
// M^{-1} metric: R u = -A^T f, followed by two corrected semi-normal steps.
// Exact when f is in the image of (1 - Lap).
Vector forward_solve(const KktBlocks& blocks, const Vector& f);

// Observation right-hand side K u for the state generated by f_true.
Vector manufacture_observation(const KktBlocks& blocks, const Vector& f_true);

// Dense images of the blocks in coordinates where the weighted norms
// become Euclidean: with M = F_M F_M^T and aR + K = F_S F_S^T,
//   coupling    = sqrt(a) F_M^{-1} A F_S^{-T}   (n_w x n_u)
//   observation = F_S^{-1} K F_S^{-T}           (n_u x n_u)
// In these coordinates the preconditioned system is
//   [[I, 0, I], [0, observation, coupling^T], [I, coupling, 0]].
struct WeightedCoordinates {
  DenseMatrix coupling;
  DenseMatrix observation;
};

WeightedCoordinates weighted_coordinates(const KktSystem& kkt);

// Measured constants of the saddle-point stability conditions in the
// weighted norms (desk-scale, dense).
struct KktStability {
  double inf_sup = 0.0;      // smallest singular value of the constraint block
  double coercivity = 0.0;   // min Rayleigh quotient of diag(aM, K) on ker[M A]
  double boundedness = 0.0;  // operator norm of the full system
};

KktStability measure_kkt_stability(const KktSystem& kkt);

// Eigenvalues of the weighted-coordinate operator, computed after the
// orthogonal deflation of the part of the control/dual space orthogonal to
// range(coupling); each deflated pair contributes the eigenvalues of
// [[1, 1], [1, 0]]. Sorted ascending.
std::vector<double> weighted_spectrum(const WeightedCoordinates& wc);

}  // namespace bocp
