#include <bocp/abstract.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <bocp/sparse.hpp>
#include <bocp/spectral.hpp>

namespace bocp {

namespace {

Vector symmetric_eigenvalues(const DenseMatrix& s) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver failed");
  }
  return eig.eigenvalues();
}

double scale_of(const Vector& eigenvalues) {
  return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

AssumptionCheck definiteness_check(std::string name, const DenseMatrix& s, double tol, bool strict) {
  AssumptionCheck check;
  check.name = std::move(name);
  if (s.size() == 0) {
    check.passed = true;
    check.detail = "empty";
    return check;
  }
  Vector ev = symmetric_eigenvalues(s);
  check.value = ev.minCoeff();
  double threshold = tol * std::max(scale_of(ev), 1e-300);
  double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  bool symmetric = asym <= tol * std::max(s.cwiseAbs().maxCoeff(), 1e-300);
  check.passed = symmetric && (strict ? check.value > threshold : check.value >= -threshold);
  std::ostringstream msg;
  msg << "min eigenvalue " << check.value << (symmetric ? "" : ", not symmetric");
  check.detail = msg.str();
  return check;
}

// Orthonormal basis of ker A from the SVD.
DenseMatrix kernel_basis(const DenseMatrix& a, double tol, double* smallest_nonzero) {
  Eigen::JacobiSVD<DenseMatrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double top = sv.size() > 0 ? sv[0] : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); i++) {
    if (sv[i] > tol * top) {
      rank = i + 1;
    }
  }
  if (smallest_nonzero) {
    *smallest_nonzero = rank > 0 ? sv[rank - 1] : 0.0;
  }
  return svd.matrixV().rightCols(a.cols() - rank);
}

struct DenseWeighted {
  DenseMatrix coupling;     // sqrt(a) F_M^{-1} A F_S^{-T}
  DenseMatrix observation;  // F_S^{-1} K F_S^{-T}
};

DenseWeighted dense_weighted(const OperatorTriple& t) {
  Eigen::LLT<DenseMatrix> mass(t.mass);
  if (mass.info() != Eigen::Success) {
    throw std::runtime_error("M is not SPD");
  }
  DenseMatrix scaled_state = std::sqrt(t.alpha) * mass.matrixL().solve(t.state);
  auto n_w = t.n_control();
  auto n_u = t.n_state();
  DenseWeighted w;

  if (!t.regularity) {
    // aR + K = G^T G with G = [sqrt(a) F_M^{-1} A; T]. With G = Q R the
    // weighted blocks are the two row blocks of Q, which avoids forming the
    // possibly ill-conditioned aR + K.
    DenseMatrix map;
    if (t.observation_map) {
      map = *t.observation_map;
    } else {
      Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(t.observation);
      map = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
    }
    if (map.cols() != n_u) {
      throw std::invalid_argument("observation map has the wrong number of columns");
    }
    DenseMatrix g(n_w + map.rows(), n_u);
    g << scaled_state, map;
    if (g.rows() < n_u) {
      throw std::runtime_error("aR + K is singular");
    }
    Eigen::HouseholderQR<DenseMatrix> qr(g);
    DenseMatrix r = qr.matrixQR().topRows(n_u).triangularView<Eigen::Upper>();
    double top = r.diagonal().cwiseAbs().maxCoeff();
    if (!(r.diagonal().cwiseAbs().minCoeff() > 1e-14 * top)) {
      throw std::runtime_error("aR + K is not SPD");
    }
    DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(g.rows(), n_u);
    w.coupling = q.topRows(n_w);
    DenseMatrix lower = q.bottomRows(map.rows());
    w.observation = lower.transpose() * lower;
    return w;
  }

  DenseMatrix s = t.alpha * regularity_of(t) + t.observation;
  Eigen::LLT<DenseMatrix> state(0.5 * (s + s.transpose()));
  if (state.info() != Eigen::Success) {
    throw std::runtime_error("aR + K is not SPD");
  }
  w.coupling = state.matrixL().solve(scaled_state.transpose()).transpose();
  DenseMatrix half = state.matrixL().solve(t.observation);
  w.observation = state.matrixL().solve(half.transpose());
  w.observation = 0.5 * (w.observation + w.observation.transpose()).eval();
  return w;
}

// [[I, 0, I], [0, observation, coupling^T], [I, coupling, 0]]
DenseMatrix weighted_operator(const DenseWeighted& w) {
  auto n_w = w.coupling.rows();
  auto n_u = w.coupling.cols();
  DenseMatrix op = DenseMatrix::Zero(2 * n_w + n_u, 2 * n_w + n_u);
  op.block(0, 0, n_w, n_w).setIdentity();
  op.block(0, n_w + n_u, n_w, n_w).setIdentity();
  op.block(n_w + n_u, 0, n_w, n_w).setIdentity();
  op.block(n_w, n_w, n_u, n_u) = w.observation;
  op.block(n_w, n_w + n_u, n_u, n_w) = w.coupling.transpose();
  op.block(n_w + n_u, n_w, n_w, n_u) = w.coupling;
  return op;
}

}  // namespace

DenseMatrix regularity_of(const OperatorTriple& triple) {
  if (triple.regularity) {
    return *triple.regularity;
  }
  Eigen::LLT<DenseMatrix> mass(triple.mass);
  if (mass.info() != Eigen::Success) {
    throw std::runtime_error("M is not SPD");
  }
  DenseMatrix r = triple.state.transpose() * mass.solve(triple.state);
  return 0.5 * (r + r.transpose());
}

bool AssumptionVerdict::ok() const {
  for (const auto& c : checks) {
    if (!c.passed) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> AssumptionVerdict::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed) {
      out.push_back(c.name + ": " + c.detail);
    }
  }
  return out;
}

AssumptionVerdict validate_assumptions(const OperatorTriple& t, double tol) {
  auto n_w = t.mass.rows();
  auto n_u = t.observation.rows();
  if (t.mass.cols() != n_w || t.observation.cols() != n_u || t.state.rows() != n_w ||
      t.state.cols() != n_u) {
    throw std::invalid_argument("operator triple has inconsistent dimensions");
  }
  AssumptionVerdict verdict;
  auto b1 = definiteness_check("B1 (M SPD)", t.mass, tol, true);
  verdict.checks.push_back(b1);
  verdict.checks.push_back(definiteness_check("B3 (K symmetric PSD)", t.observation, tol, false));
  if (b1.passed) {
    verdict.checks.push_back(definiteness_check("B2 (K + R SPD)", t.observation + regularity_of(t), tol, true));
  } else {
    verdict.checks.push_back({"B2 (K + R SPD)", false, 0.0, "R undefined without B1"});
  }

  double smallest = 0.0;
  DenseMatrix kernel = kernel_basis(t.state, 1e-12, &smallest);
  AssumptionCheck a1;
  a1.name = "A1 (closed range of A)";
  a1.value = smallest;
  a1.passed = smallest > 0.0;
  a1.detail = "smallest nonzero singular value " + std::to_string(smallest);
  verdict.checks.push_back(a1);

  AssumptionCheck a2;
  a2.name = "A2 (K definite on ker A)";
  if (kernel.cols() == 0) {
    a2.passed = true;
    a2.detail = "ker A trivial";
  } else {
    DenseMatrix restricted = kernel.transpose() * t.observation * kernel;
    Vector ev = symmetric_eigenvalues(restricted);
    Vector full = symmetric_eigenvalues(t.observation);
    a2.value = ev.minCoeff();
    a2.passed = a2.value > tol * std::max(scale_of(full), 1e-300);
    a2.detail = "dim ker A = " + std::to_string(kernel.cols()) + ", min eigenvalue on ker A " +
                std::to_string(a2.value);
  }
  verdict.checks.push_back(a2);
  return verdict;
}

DenseMatrix system_matrix(const OperatorTriple& t) {
  auto n_w = t.n_control();
  auto n_u = t.n_state();
  DenseMatrix a = DenseMatrix::Zero(t.size(), t.size());
  a.block(0, 0, n_w, n_w) = t.alpha * t.mass;
  a.block(0, n_w + n_u, n_w, n_w) = t.mass;
  a.block(n_w, n_w, n_u, n_u) = t.observation;
  a.block(n_w, n_w + n_u, n_u, n_w) = t.state.transpose();
  a.block(n_w + n_u, 0, n_w, n_w) = t.mass;
  a.block(n_w + n_u, n_w, n_w, n_u) = t.state;
  return a;
}

GeneralPreconditioner build_general_preconditioner(const OperatorTriple& t) {
  auto n_w = t.n_control();
  auto n_u = t.n_state();
  GeneralPreconditioner g;
  g.riesz = DenseMatrix::Zero(t.size(), t.size());
  g.inverse = DenseMatrix::Zero(t.size(), t.size());

  auto invert = [](const DenseMatrix& s, const char* name) {
    Eigen::LLT<DenseMatrix> llt(s);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error(std::string(name) + " is not SPD");
    }
    return DenseMatrix(llt.solve(DenseMatrix::Identity(s.rows(), s.cols())));
  };

  DenseMatrix state_block = t.alpha * regularity_of(t) + t.observation;
  g.riesz.block(0, 0, n_w, n_w) = t.alpha * t.mass;
  g.riesz.block(n_w, n_w, n_u, n_u) = state_block;
  g.riesz.block(n_w + n_u, n_w + n_u, n_w, n_w) = t.mass / t.alpha;

  DenseMatrix mass_inv = invert(t.mass, "M");
  g.inverse.block(0, 0, n_w, n_w) = mass_inv / t.alpha;
  g.inverse.block(n_w, n_w, n_u, n_u) = invert(state_block, "aR + K");
  g.inverse.block(n_w + n_u, n_w + n_u, n_w, n_w) = t.alpha * mass_inv;
  return g;
}

std::vector<double> preconditioned_spectrum(const OperatorTriple& triple) {
  // The preconditioned operator is similar to the weighted one.
  Vector ev = symmetric_eigenvalues(weighted_operator(dense_weighted(triple)));
  return {ev.data(), ev.data() + ev.size()};
}

StabilityReport measure_stability(const OperatorTriple& t) {
  auto w = dense_weighted(t);
  auto n_u = w.coupling.cols();
  StabilityReport report;

  // Smallest singular value of the weighted constraint block [I, coupling].
  DenseMatrix outer = w.coupling * w.coupling.transpose();
  report.inf_sup = std::sqrt(1.0 + std::max(symmetric_eigenvalues(outer).minCoeff(), 0.0));

  // On the kernel f = -coupling u.
  DenseMatrix gram = w.coupling.transpose() * w.coupling;
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> coercive(
      gram + w.observation, gram + DenseMatrix::Identity(n_u, n_u), Eigen::EigenvaluesOnly);
  report.coercivity = coercive.eigenvalues().minCoeff();

  report.boundedness = symmetric_eigenvalues(weighted_operator(w)).cwiseAbs().maxCoeff();
  return report;
}

OperatorTriple random_instance(std::uint64_t seed, const InstanceDims& dims, Index ker_k_dim, double alpha) {
  auto n_w = dims.control;
  auto n_u = dims.state;
  if (n_w < 1 || n_u < 1 || dims.observation < 1) {
    throw std::invalid_argument("instance dimensions must be positive");
  }
  if (ker_k_dim < 0 || ker_k_dim >= n_u) {
    throw std::invalid_argument("ker K dimension must be in [0, state dim)");
  }
  if (dims.observation < n_u - ker_k_dim) {
    throw std::invalid_argument("too few observation rows for the requested rank of K");
  }
  if (n_w < n_u && ker_k_dim > n_w) {
    throw std::invalid_argument("ker K and ker A would intersect");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Index rows, Index cols) {
    DenseMatrix g(rows, cols);
    for (Index j = 0; j < cols; j++) {
      for (Index i = 0; i < rows; i++) {
        g(i, j) = normal(rng);
      }
    }
    return g;
  };

  OperatorTriple t;
  t.alpha = alpha;
  DenseMatrix f = gaussian(n_w, n_w) / std::sqrt(static_cast<double>(n_w));
  t.mass = f * f.transpose() + 0.1 * DenseMatrix::Identity(n_w, n_w);
  t.mass = 0.5 * (t.mass + t.mass.transpose()).eval();
  t.state = gaussian(n_w, n_u);

  Eigen::HouseholderQR<DenseMatrix> qr(gaussian(n_u, n_u));
  DenseMatrix q = qr.householderQ();
  DenseMatrix range = q.rightCols(n_u - ker_k_dim);
  DenseMatrix map = gaussian(dims.observation, n_u - ker_k_dim) * range.transpose();
  t.observation = map.transpose() * map;
  t.observation = 0.5 * (t.observation + t.observation.transpose()).eval();
  t.observation_map = std::move(map);
  return t;
}

OperatorTriple triple_from_blocks(const KktBlocks& blocks, double alpha, bool use_assembled_regularity) {
  OperatorTriple t;
  t.alpha = alpha;
  t.mass = to_dense(blocks.mass);
  t.observation = to_dense(blocks.observation);
  t.state = to_dense(blocks.state);
  if (use_assembled_regularity) {
    t.regularity = to_dense(blocks.regularity);
  }
  return t;
}

OperatorTriple example_triple(Variant variant, Index n_cells_per_side, double alpha) {
  auto d = discretize(n_cells_per_side, variant);
  return triple_from_blocks(*d.blocks, alpha);
}

void export_triple(const OperatorTriple& triple, const std::string& prefix) {
  auto write = [&](const DenseMatrix& m, const std::string& name) {
    std::ofstream os(prefix + name);
    if (!os) {
      throw std::runtime_error("cannot open " + prefix + name);
    }
    SparseMatrix s = m.sparseView();
    write_matrix_market(os, s);
  };
  write(triple.mass, "M.mtx");
  write(triple.observation, "K.mtx");
  write(triple.state, "A.mtx");
}

}  // namespace bocp
