#include <bocp/kkt.hpp>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <stdexcept>

namespace bocp {

namespace {

using ColMajorSparse = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using Cholesky = Eigen::SimplicialLLT<ColMajorSparse, Eigen::Lower>;
// The DG mass matrix is block diagonal, so the natural ordering has no fill.
using BlockCholesky = Eigen::SimplicialLLT<ColMajorSparse, Eigen::Lower, Eigen::NaturalOrdering<int>>;

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be positive and finite");
  }
}

BlockLayout layout_of(const KktBlocks& blocks) {
  return {blocks.n_control(), blocks.n_state(), blocks.n_control()};
}

SparseMatrix state_block_matrix(const KktBlocks& blocks, double alpha) {
  SparseMatrix s = alpha * blocks.regularity + blocks.observation;
  s.makeCompressed();
  return s;
}

}  // namespace

Variant parse_variant(const std::string& name) {
  if (name == "boundary_obs") {
    return Variant::boundary_obs;
  }
  if (name == "full_obs") {
    return Variant::full_obs;
  }
  if (name == "laplace_state") {
    return Variant::laplace_state;
  }
  throw std::invalid_argument("unknown variant: " + name);
}

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::boundary_obs:
      return "boundary_obs";
    case Variant::full_obs:
      return "full_obs";
    case Variant::laplace_state:
      return "laplace_state";
  }
  return "unknown";
}

void KktBlocks::check_dimensions() const {
  auto n_w = mass.rows();
  auto n_u = observation.rows();
  if (mass.cols() != n_w || observation.cols() != n_u || regularity.rows() != n_u ||
      regularity.cols() != n_u || state.rows() != n_w || state.cols() != n_u) {
    throw std::invalid_argument("KKT blocks have inconsistent dimensions");
  }
}

Vector Discretization::observation_rhs(const ScalarField& d) const {
  if (variant == Variant::full_obs) {
    return assemble_volume_rhs_bfs(grid, bfs, d);
  }
  return assemble_observation_rhs(grid, bfs, d);
}

Discretization discretize(Index n_cells_per_side, Variant variant) {
  Discretization disc;
  disc.grid = build_grid(n_cells_per_side);
  disc.bfs = dof_map_bfs(disc.grid);
  disc.dg = dof_map_dg(disc.grid);
  disc.variant = variant;

  auto op = variant == Variant::laplace_state ? StateOperator::laplace : StateOperator::helmholtz;
  auto blocks = std::make_shared<KktBlocks>();
  blocks->mass = assemble_mass_dg(disc.grid, disc.dg);
  blocks->observation = variant == Variant::full_obs ? assemble_mass_bfs(disc.grid, disc.bfs)
                                                     : assemble_boundary_mass(disc.grid, disc.bfs);
  blocks->state = assemble_state_operator(disc.grid, disc.bfs, disc.dg, op);
  blocks->regularity = assemble_regularity_form(disc.grid, disc.bfs, op);
  blocks->check_dimensions();
  disc.blocks = std::move(blocks);
  return disc;
}

KktSystem::KktSystem(std::shared_ptr<const KktBlocks> blocks, double alpha, const Vector& observation_rhs)
    : blocks_(std::move(blocks)), alpha_(alpha) {
  check_alpha(alpha);
  blocks_->check_dimensions();
  layout_ = layout_of(*blocks_);
  if (observation_rhs.size() != layout_.n_u) {
    throw std::invalid_argument("observation right-hand side has wrong size");
  }
  rhs_ = Vector::Zero(layout_.size());
  rhs_.segment(layout_.u_offset(), layout_.n_u) = observation_rhs;
}

void KktSystem::apply(const Vector& x, Vector& y) const {
  if (x.size() != size()) {
    throw std::invalid_argument("KktSystem::apply: dimension mismatch");
  }
  const auto& b = *blocks_;
  const auto& l = layout_;
  auto f = x.segment(0, l.n_f);
  auto u = x.segment(l.u_offset(), l.n_u);
  auto w = x.segment(l.w_offset(), l.n_w);
  y.resize(size());
  y.segment(0, l.n_f).noalias() = alpha_ * (b.mass * f) + b.mass * w;
  y.segment(l.u_offset(), l.n_u).noalias() = b.observation * u + b.state.transpose() * w;
  y.segment(l.w_offset(), l.n_w).noalias() = b.mass * f + b.state * u;
}

LinearOperator KktSystem::op() const {
  auto self = *this;
  return {size(), [self](const Vector& x, Vector& y) { self.apply(x, y); }};
}

SparseMatrix KktSystem::monolithic() const {
  const auto& b = *blocks_;
  const auto& l = layout_;
  std::vector<Eigen::Triplet<double>> t;
  auto add = [&t](const SparseMatrix& m, Index r0, Index c0, double scale) {
    for (Index i = 0; i < m.outerSize(); i++) {
      for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
        t.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
      }
    }
  };
  SparseMatrix at = b.state.transpose();
  add(b.mass, 0, 0, alpha_);
  add(b.mass, 0, l.w_offset(), 1.0);
  add(b.observation, l.u_offset(), l.u_offset(), 1.0);
  add(at, l.u_offset(), l.w_offset(), 1.0);
  add(b.mass, l.w_offset(), 0, 1.0);
  add(b.state, l.w_offset(), l.u_offset(), 1.0);
  SparseMatrix s(size(), size());
  s.setFromTriplets(t.begin(), t.end());
  s.makeCompressed();
  return s;
}

KktSystem build_kkt(std::shared_ptr<const KktBlocks> blocks, double alpha, const Vector& observation_rhs) {
  return {std::move(blocks), alpha, observation_rhs};
}

WeightedNorm::WeightedNorm(std::shared_ptr<const KktBlocks> blocks, double alpha)
    : blocks_(std::move(blocks)), alpha_(alpha) {
  check_alpha(alpha);
}

double WeightedNorm::squared(const Vector& x) const {
  const auto& b = *blocks_;
  auto l = layout_of(b);
  if (x.size() != l.size()) {
    throw std::invalid_argument("WeightedNorm: dimension mismatch");
  }
  Vector f = x.segment(0, l.n_f);
  Vector u = x.segment(l.u_offset(), l.n_u);
  Vector w = x.segment(l.w_offset(), l.n_w);
  return alpha_ * f.dot(b.mass * f) + alpha_ * u.dot(b.regularity * u) + u.dot(b.observation * u) +
         w.dot(b.mass * w) / alpha_;
}

struct ExactPreconditioner::Factors {
  SparseMatrix state_block;
  BlockCholesky mass;
  Cholesky state;
};

ExactPreconditioner::ExactPreconditioner(std::shared_ptr<const KktBlocks> blocks, double alpha)
    : blocks_(std::move(blocks)), alpha_(alpha) {
  check_alpha(alpha);
  blocks_->check_dimensions();
  layout_ = layout_of(*blocks_);

  auto factors = std::make_shared<Factors>();
  factors->state_block = state_block_matrix(*blocks_, alpha);
  factors->mass.compute(ColMajorSparse(blocks_->mass));
  if (factors->mass.info() != Eigen::Success) {
    throw std::runtime_error("mass matrix is not SPD");
  }
  factors->state.compute(ColMajorSparse(factors->state_block));
  if (factors->state.info() != Eigen::Success) {
    throw std::runtime_error("state block aR + K is not SPD");
  }
  factors_ = std::move(factors);
}

Vector ExactPreconditioner::solve_control(const Vector& b) const { return factors_->mass.solve(b) / alpha_; }

Vector ExactPreconditioner::solve_state(const Vector& b) const { return factors_->state.solve(b); }

Vector ExactPreconditioner::solve_dual(const Vector& b) const { return alpha_ * factors_->mass.solve(b); }

const SparseMatrix& ExactPreconditioner::state_block() const { return factors_->state_block; }

Vector ExactPreconditioner::apply(const Vector& x) const {
  if (x.size() != size()) {
    throw std::invalid_argument("ExactPreconditioner: dimension mismatch");
  }
  const auto& l = layout_;
  Vector y(size());
  y.segment(0, l.n_f) = solve_control(x.segment(0, l.n_f));
  y.segment(l.u_offset(), l.n_u) = solve_state(x.segment(l.u_offset(), l.n_u));
  y.segment(l.w_offset(), l.n_w) = solve_dual(x.segment(l.w_offset(), l.n_w));
  return y;
}

Vector ExactPreconditioner::apply_inverse(const Vector& x) const {
  if (x.size() != size()) {
    throw std::invalid_argument("ExactPreconditioner: dimension mismatch");
  }
  const auto& l = layout_;
  const auto& m = blocks_->mass;
  Vector y(size());
  y.segment(0, l.n_f) = alpha_ * (m * x.segment(0, l.n_f));
  y.segment(l.u_offset(), l.n_u) = factors_->state_block * x.segment(l.u_offset(), l.n_u);
  y.segment(l.w_offset(), l.n_w) = (m * x.segment(l.w_offset(), l.n_w)) / alpha_;
  return y;
}

LinearOperator ExactPreconditioner::op() const {
  auto self = *this;
  return {size(), [self](const Vector& x, Vector& y) { y = self.apply(x); }};
}

Vector forward_solve(const KktBlocks& blocks, const Vector& f) {
  blocks.check_dimensions();
  if (f.size() != blocks.n_control()) {
    throw std::invalid_argument("forward_solve: control has wrong size");
  }
  Cholesky llt(ColMajorSparse(blocks.regularity));
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("regularity form R is singular or indefinite");
  }
  Cholesky mass(ColMajorSparse(blocks.mass));
  if (mass.info() != Eigen::Success) {
    throw std::runtime_error("mass matrix is not SPD");
  }
  // Normal equations, then corrected semi-normal steps against A u = -M f.
  // R and A'M^-1 A agree only to round-off, and cond(R) grows like h^-4, so
  // the plain solve alone loses about half the digits on fine grids.
  Vector data = -(blocks.mass * f);
  Vector u = llt.solve(Vector(-(blocks.state.transpose() * f)));
  for (int step = 0; step < 2; step++) {
    Vector residual = data - blocks.state * u;
    u += llt.solve(Vector(blocks.state.transpose() * mass.solve(residual)));
  }
  return u;
}

Vector manufacture_observation(const KktBlocks& blocks, const Vector& f_true) {
  Vector u = forward_solve(blocks, f_true);
  return blocks.observation * u;
}

WeightedCoordinates weighted_coordinates(const KktSystem& kkt) {
  const auto& b = kkt.blocks();
  double alpha = kkt.alpha();

  BlockCholesky mass(ColMajorSparse(b.mass));
  if (mass.info() != Eigen::Success) {
    throw std::runtime_error("mass matrix is not SPD");
  }
  DenseMatrix state_block = DenseMatrix(state_block_matrix(b, alpha));
  Eigen::LLT<DenseMatrix> state(state_block);
  if (state.info() != Eigen::Success) {
    throw std::runtime_error("state block aR + K is not SPD");
  }

  // F_M^{-1} A, then right-multiply by F_S^{-T} via a triangular solve on
  // the transpose.
  DenseMatrix scaled_state = mass.matrixL().solve(DenseMatrix(b.state));
  DenseMatrix coupling_t = state.matrixL().solve(scaled_state.transpose());
  WeightedCoordinates wc;
  wc.coupling = std::sqrt(alpha) * coupling_t.transpose();

  DenseMatrix k = DenseMatrix(b.observation);
  DenseMatrix half = state.matrixL().solve(k);
  wc.observation = state.matrixL().solve(half.transpose());
  wc.observation = 0.5 * (wc.observation + wc.observation.transpose()).eval();
  return wc;
}

std::vector<double> weighted_spectrum(const WeightedCoordinates& wc) {
  auto n_w = wc.coupling.rows();
  auto n_u = wc.coupling.cols();
  if (n_w < n_u) {
    throw std::invalid_argument("weighted_spectrum needs n_w >= n_u");
  }

  DenseMatrix gram = wc.coupling.transpose() * wc.coupling;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> svd(gram);
  if (svd.info() != Eigen::Success) {
    throw std::runtime_error("eigensolver failed on the coupling Gram matrix");
  }
  const DenseMatrix& v = svd.eigenvectors();
  Vector sigma = svd.eigenvalues().cwiseMax(0.0).cwiseSqrt();

  DenseMatrix reduced = DenseMatrix::Zero(3 * n_u, 3 * n_u);
  reduced.block(0, 0, n_u, n_u).setIdentity();
  reduced.block(0, 2 * n_u, n_u, n_u).setIdentity();
  reduced.block(2 * n_u, 0, n_u, n_u).setIdentity();
  reduced.block(n_u, n_u, n_u, n_u) = v.transpose() * wc.observation * v;
  reduced.block(n_u, 2 * n_u, n_u, n_u) = sigma.asDiagonal();
  reduced.block(2 * n_u, n_u, n_u, n_u) = sigma.asDiagonal();

  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(reduced, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigensolver failed on the reduced operator");
  }

  std::vector<double> values(eig.eigenvalues().data(), eig.eigenvalues().data() + 3 * n_u);
  const double q_low = 0.5 * (1.0 - std::sqrt(5.0));
  const double q_high = 0.5 * (1.0 + std::sqrt(5.0));
  for (Index i = 0; i < n_w - n_u; i++) {
    values.push_back(q_low);
    values.push_back(q_high);
  }
  std::sort(values.begin(), values.end());
  return values;
}

KktStability measure_kkt_stability(const KktSystem& kkt) {
  auto wc = weighted_coordinates(kkt);
  auto n_w = wc.coupling.rows();
  auto n_u = wc.coupling.cols();
  DenseMatrix gram = wc.coupling.transpose() * wc.coupling;

  KktStability out;

  // Singular values of [I, coupling] are sqrt(1 + eig(coupling coupling^T));
  // the nonzero part of that spectrum is eig(gram), padded with n_w - n_u zeros.
  Eigen::SelfAdjointEigenSolver<DenseMatrix> gram_eig(gram, Eigen::EigenvaluesOnly);
  double smallest = gram_eig.eigenvalues().minCoeff();
  if (n_w > n_u) {
    smallest = std::min(smallest, 0.0);
  }
  out.inf_sup = std::sqrt(1.0 + std::max(smallest, 0.0));

  // Kernel of [I, coupling] is {(-coupling u, u)}.
  DenseMatrix numerator = gram + wc.observation;
  DenseMatrix denominator = gram + DenseMatrix::Identity(n_u, n_u);
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> coercive(numerator, denominator,
                                                                 Eigen::EigenvaluesOnly);
  out.coercivity = coercive.eigenvalues().minCoeff();

  auto spectrum = weighted_spectrum(wc);
  out.boundedness = std::max(std::abs(spectrum.front()), std::abs(spectrum.back()));
  return out;
}

}  // namespace bocp
