#include <bocp/solvers.hpp>

#include <Eigen/SparseCholesky>

#include <stdexcept>

#include <bocp/assembly.hpp>

namespace bocp {

struct Multigrid::CoarseSolver {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double, Eigen::ColMajor>, Eigen::Lower> llt;
};

Multigrid::Multigrid(std::vector<Level> levels, MultigridConfig config)
    : levels_(std::move(levels)), config_(config) {
  if (levels_.empty()) {
    throw std::invalid_argument("multigrid needs at least one level");
  }
  if (config_.n_vcycles < 1 || config_.pre_sweeps < 0 || config_.post_sweeps < 0) {
    throw std::invalid_argument("invalid multigrid configuration");
  }
  for (std::size_t l = 1; l < levels_.size(); l++) {
    const auto& p = levels_[l].prolongation;
    if (p.rows() != levels_[l].matrix->rows() || p.cols() != levels_[l - 1].matrix->rows()) {
      throw std::invalid_argument("prolongation does not match level sizes");
    }
  }

  auto coarse = std::make_shared<CoarseSolver>();
  coarse->llt.compute(Eigen::SparseMatrix<double, Eigen::ColMajor>(*levels_.front().matrix));
  if (coarse->llt.info() != Eigen::Success) {
    throw std::runtime_error("coarse-level matrix is not SPD");
  }
  coarse_ = std::move(coarse);

  for (const auto& level : levels_) {
    smoothers_.emplace_back(level.matrix, level.blocks);
  }
}

Index Multigrid::size() const { return levels_.back().matrix->rows(); }

void Multigrid::vcycle(std::size_t level, const Vector& b, Vector& x) const {
  if (level == 0) {
    x = coarse_->llt.solve(b);
    return;
  }
  const auto& smoother = smoothers_[level];
  const auto& a = *levels_[level].matrix;
  const auto& p = levels_[level].prolongation;

  for (int k = 0; k < config_.pre_sweeps; k++) {
    smoother.symmetric(b, x);
  }
  Vector residual = b - a * x;
  Vector coarse_rhs = p.transpose() * residual;
  Vector correction = Vector::Zero(coarse_rhs.size());
  vcycle(level - 1, coarse_rhs, correction);
  x += p * correction;
  for (int k = 0; k < config_.post_sweeps; k++) {
    smoother.symmetric(b, x);
  }
}

Vector Multigrid::apply(const Vector& b) const {
  if (b.size() != size()) {
    throw std::invalid_argument("multigrid: dimension mismatch");
  }
  auto top = levels_.size() - 1;
  Vector x = Vector::Zero(b.size());
  vcycle(top, b, x);
  const auto& a = *levels_.back().matrix;
  for (int k = 1; k < config_.n_vcycles; k++) {
    Vector residual = b - a * x;
    Vector correction = Vector::Zero(b.size());
    vcycle(top, residual, correction);
    x += correction;
  }
  return x;
}

LinearOperator Multigrid::op() const {
  auto self = *this;
  return {size(), [self](const Vector& b, Vector& x) { x = self.apply(b); }};
}

MeshHierarchy multigrid_hierarchy(Index n_cells_per_side, Index coarsest) {
  if (n_cells_per_side < 1 || coarsest < 1) {
    throw std::invalid_argument("invalid hierarchy size");
  }
  if (n_cells_per_side <= coarsest) {
    return build_uniform_mesh(n_cells_per_side, 0);
  }
  Index levels = 0;
  Index n = n_cells_per_side;
  while (n > coarsest && n % 2 == 0) {
    n /= 2;
    levels++;
  }
  if (n != coarsest) {
    throw std::invalid_argument("grid size is not a power-of-two refinement of the coarsest level");
  }
  return build_uniform_mesh(coarsest, levels);
}

Multigrid build_state_multigrid(const MeshHierarchy& hierarchy, double alpha, Variant variant,
                                MultigridConfig config) {
  auto op = variant == Variant::laplace_state ? StateOperator::laplace : StateOperator::helmholtz;
  std::vector<Multigrid::Level> levels;
  DofMap previous;
  for (Index l = 0; l < hierarchy.n_levels(); l++) {
    const auto& grid = hierarchy.levels[l];
    auto map = dof_map_bfs(grid);
    SparseMatrix observation =
        variant == Variant::full_obs ? assemble_mass_bfs(grid, map) : assemble_boundary_mass(grid, map);
    SparseMatrix s = alpha * assemble_regularity_form(grid, map, op) + observation;
    s.makeCompressed();

    Multigrid::Level level;
    level.matrix = std::make_shared<const SparseMatrix>(std::move(s));
    level.blocks = vertex_blocks(map);
    if (l > 0) {
      level.prolongation = assemble_prolongation(hierarchy.levels[l - 1], previous, grid, map);
    }
    levels.push_back(std::move(level));
    previous = std::move(map);
  }
  return {std::move(levels), config};
}

LinearOperator block_preconditioner(LinearOperator control, LinearOperator state, LinearOperator dual) {
  return block_diagonal({std::move(control), std::move(state), std::move(dual)});
}

LinearOperator build_approx_preconditioner(const KktSystem& kkt, LinearOperator state_approx,
                                           int gs_sweeps) {
  if (state_approx.size() != kkt.layout().n_u) {
    throw std::invalid_argument("state block approximation has wrong size");
  }
  double alpha = kkt.alpha();
  auto mass = std::make_shared<const SparseMatrix>(kkt.blocks().mass);
  auto gs = symmetric_gauss_seidel(mass, gs_sweeps);
  // GS(cM) = GS(M) / c for any c > 0.
  return block_preconditioner(scaled(gs, 1.0 / alpha), std::move(state_approx), scaled(gs, alpha));
}

LinearOperator build_approx_preconditioner(const KktSystem& kkt, const MeshHierarchy& hierarchy,
                                           Variant variant, MultigridConfig config, int gs_sweeps) {
  auto mg = build_state_multigrid(hierarchy, kkt.alpha(), variant, config);
  return build_approx_preconditioner(kkt, mg.op(), gs_sweeps);
}

}  // namespace bocp
