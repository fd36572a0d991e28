#include <bocp/sparse.hpp>

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bocp {

SparseMatrix from_triplets(Index rows, Index cols, const std::vector<Eigen::Triplet<double>>& triplets) {
  SparseMatrix s(rows, cols);
  s.setFromTriplets(triplets.begin(), triplets.end());
  s.prune([](Index i, Index j, double v) { return v != 0.0 || i == j; });
  s.makeCompressed();
  return s;
}

SparseMatrix symmetrized(const SparseMatrix& s) {
  if (s.rows() != s.cols()) {
    throw std::invalid_argument("symmetrized: matrix is not square");
  }
  SparseMatrix t = s.transpose();
  SparseMatrix sym = 0.5 * (s + t);
  sym.prune([](Index i, Index j, double v) { return v != 0.0 || i == j; });
  sym.makeCompressed();
  return sym;
}

double asymmetry_norm(const SparseMatrix& s) {
  SparseMatrix t = s.transpose();
  SparseMatrix d = s - t;
  double norm = 0.0;
  for (Index i = 0; i < d.outerSize(); i++) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(d, i); it; ++it) {
      row += std::abs(it.value());
    }
    norm = std::max(norm, row);
  }
  return norm;
}

DenseMatrix to_dense(const SparseMatrix& s) { return DenseMatrix(s); }

void write_matrix_market(std::ostream& os, const SparseMatrix& s) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << s.rows() << ' ' << s.cols() << ' ' << s.nonZeros() << '\n';
  os << std::setprecision(17);
  for (Index i = 0; i < s.outerSize(); i++) {
    for (SparseMatrix::InnerIterator it(s, i); it; ++it) {
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

SparseMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0) {
    throw std::runtime_error("not a Matrix Market file");
  }
  if (line.find("coordinate") == std::string::npos || line.find("general") == std::string::npos) {
    throw std::runtime_error("only coordinate general matrices are supported");
  }
  while (std::getline(is, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream header(line);
  Index rows = 0;
  Index cols = 0;
  Index nnz = 0;
  if (!(header >> rows >> cols >> nnz)) {
    throw std::runtime_error("malformed Matrix Market size line");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(nnz);
  for (Index k = 0; k < nnz; k++) {
    Index i = 0;
    Index j = 0;
    double v = 0.0;
    if (!(is >> i >> j >> v)) {
      throw std::runtime_error("truncated Matrix Market file");
    }
    triplets.emplace_back(i - 1, j - 1, v);
  }
  SparseMatrix s(rows, cols);
  s.setFromTriplets(triplets.begin(), triplets.end());
  s.makeCompressed();
  return s;
}

void LinearOperator::apply(const Vector& x, Vector& y) const {
  if (x.size() != size_) {
    throw std::invalid_argument("LinearOperator: dimension mismatch");
  }
  fn_(x, y);
}

Vector LinearOperator::operator()(const Vector& x) const {
  Vector y(size_);
  apply(x, y);
  return y;
}

LinearOperator LinearOperator::identity(Index size) {
  return {size, [](const Vector& x, Vector& y) { y = x; }};
}

LinearOperator LinearOperator::matrix(std::shared_ptr<const SparseMatrix> s) {
  if (s->rows() != s->cols()) {
    throw std::invalid_argument("LinearOperator: matrix is not square");
  }
  auto n = s->rows();
  return {n, [s = std::move(s)](const Vector& x, Vector& y) { y.noalias() = *s * x; }};
}

LinearOperator LinearOperator::matrix(SparseMatrix s) {
  return matrix(std::make_shared<const SparseMatrix>(std::move(s)));
}

LinearOperator scaled(LinearOperator op, double factor) {
  auto n = op.size();
  return {n, [op = std::move(op), factor](const Vector& x, Vector& y) {
            op.apply(x, y);
            y *= factor;
          }};
}

LinearOperator block_diagonal(std::vector<LinearOperator> ops) {
  Index n = 0;
  for (const auto& op : ops) {
    n += op.size();
  }
  return {n, [ops = std::move(ops)](const Vector& x, Vector& y) {
            y.resize(x.size());
            Index offset = 0;
            Vector yi;
            for (const auto& op : ops) {
              auto m = op.size();
              op.apply(x.segment(offset, m), yi);
              y.segment(offset, m) = yi;
              offset += m;
            }
          }};
}

}  // namespace bocp
