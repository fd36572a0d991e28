#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace bocp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

// Compressed-row storage; all assembled operators use this layout.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

}  // namespace bocp
