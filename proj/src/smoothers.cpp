#include <bocp/solvers.hpp>

#include <Eigen/Dense>

#include <stdexcept>

namespace bocp {

namespace {

void point_sweep(const SparseMatrix& s, const Vector& diag, const Vector& b, Vector& x, bool forward) {
  auto n = s.rows();
  for (Index k = 0; k < n; k++) {
    Index i = forward ? k : n - 1 - k;
    double sum = b[i];
    for (SparseMatrix::InnerIterator it(s, i); it; ++it) {
      if (it.col() != i) {
        sum -= it.value() * x[it.col()];
      }
    }
    x[i] = sum / diag[i];
  }
}

}  // namespace

LinearOperator symmetric_gauss_seidel(std::shared_ptr<const SparseMatrix> s, int sweeps) {
  if (s->rows() != s->cols()) {
    throw std::invalid_argument("Gauss-Seidel needs a square matrix");
  }
  if (sweeps < 1) {
    throw std::invalid_argument("Gauss-Seidel needs at least one sweep");
  }
  Vector diag = s->diagonal();
  for (Index i = 0; i < diag.size(); i++) {
    if (!(diag[i] != 0.0)) {
      throw std::invalid_argument("Gauss-Seidel: zero diagonal entry");
    }
  }
  auto n = s->rows();
  return {n, [s = std::move(s), diag = std::move(diag), sweeps](const Vector& b, Vector& x) {
            x = Vector::Zero(b.size());
            for (int k = 0; k < sweeps; k++) {
              point_sweep(*s, diag, b, x, true);
              point_sweep(*s, diag, b, x, false);
            }
          }};
}

BlockGaussSeidel::BlockGaussSeidel(std::shared_ptr<const SparseMatrix> s, std::vector<Index> block_starts)
    : s_(std::move(s)), starts_(std::move(block_starts)) {
  if (starts_.size() < 2 || starts_.front() != 0 || starts_.back() != s_->rows()) {
    throw std::invalid_argument("block partition does not cover the matrix");
  }
  for (std::size_t k = 0; k + 1 < starts_.size(); k++) {
    auto begin = starts_[k];
    auto size = starts_[k + 1] - begin;
    if (size <= 0) {
      throw std::invalid_argument("empty Gauss-Seidel block");
    }
    DenseMatrix block = DenseMatrix(s_->block(begin, begin, size, size));
    Eigen::LLT<DenseMatrix> llt(block);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("Gauss-Seidel diagonal block is not SPD");
    }
    inverses_.push_back(llt.solve(DenseMatrix::Identity(size, size)));
  }
}

void BlockGaussSeidel::relax_block(std::size_t k, const Vector& b, Vector& x) const {
  auto begin = starts_[k];
  auto end = starts_[k + 1];
  Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1> r(end - begin);
  for (Index i = begin; i < end; i++) {
    double sum = b[i];
    for (SparseMatrix::InnerIterator it(*s_, i); it; ++it) {
      auto j = it.col();
      if (j < begin || j >= end) {
        sum -= it.value() * x[j];
      }
    }
    r[i - begin] = sum;
  }
  x.segment(begin, end - begin).noalias() = inverses_[k] * r;
}

void BlockGaussSeidel::forward(const Vector& b, Vector& x) const {
  for (std::size_t k = 0; k + 1 < starts_.size(); k++) {
    relax_block(k, b, x);
  }
}

void BlockGaussSeidel::backward(const Vector& b, Vector& x) const {
  for (std::size_t k = starts_.size() - 1; k-- > 0;) {
    relax_block(k, b, x);
  }
}

std::vector<Index> vertex_blocks(const DofMap& bfs) {
  std::vector<Index> starts{0};
  Index count = 0;
  for (const auto& dofs : bfs.vertex_to_dofs) {
    for (auto d : dofs) {
      if (bfs.free_index[d] >= 0) {
        count++;
      }
    }
    if (count > starts.back()) {
      starts.push_back(count);
    }
  }
  return starts;
}

}  // namespace bocp
