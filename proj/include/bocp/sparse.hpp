#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "types.hpp"

namespace bocp {

// Builds a CSR matrix from (row, col, value) triplets, summing duplicates
// and dropping exact off-diagonal zeros.
SparseMatrix from_triplets(Index rows, Index cols, const std::vector<Eigen::Triplet<double>>& triplets);

// (S + S^T) / 2, which is bit-exactly symmetric.
SparseMatrix symmetrized(const SparseMatrix& s);

// Max-row-sum norm of S - S^T.
double asymmetry_norm(const SparseMatrix& s);

// Dense copy; only for desk-scale analysis.
DenseMatrix to_dense(const SparseMatrix& s);

// Matrix Market coordinate real general.
void write_matrix_market(std::ostream& os, const SparseMatrix& s);
SparseMatrix read_matrix_market(std::istream& is);

// Type-erased linear map on R^n.
class LinearOperator {
 public:
  using ApplyFn = std::function<void(const Vector&, Vector&)>;

  LinearOperator() = default;
  LinearOperator(Index size, ApplyFn fn) : size_(size), fn_(std::move(fn)) {}

  Index size() const { return size_; }
  explicit operator bool() const { return static_cast<bool>(fn_); }

  void apply(const Vector& x, Vector& y) const;
  Vector operator()(const Vector& x) const;

  static LinearOperator identity(Index size);
  static LinearOperator matrix(std::shared_ptr<const SparseMatrix> s);
  static LinearOperator matrix(SparseMatrix s);

 private:
  Index size_ = 0;
  ApplyFn fn_;
};

LinearOperator scaled(LinearOperator op, double factor);

// diag(ops[0], ops[1], ...) acting on consecutive segments.
LinearOperator block_diagonal(std::vector<LinearOperator> ops);

}  // namespace bocp
