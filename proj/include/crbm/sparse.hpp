#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace crbm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Compressed row structure; column indices sorted within each row.
class SparsityPattern {
 public:
  SparsityPattern(int n_rows, int n_cols, std::vector<int> indptr, std::vector<int> indices);

  // Union of the dense blocks dofs x dofs of every element.
  static std::shared_ptr<const SparsityPattern> from_blocks(int n, const std::vector<std::vector<int>>& blocks);

  int rows() const { return n_rows_; }
  int cols() const { return n_cols_; }
  std::size_t nnz() const { return indices_.size(); }
  const std::vector<int>& indptr() const { return indptr_; }
  const std::vector<int>& indices() const { return indices_; }

  // Storage position of (i, j), or -1 when structurally zero.
  std::ptrdiff_t find(int i, int j) const;

 private:
  int n_rows_;
  int n_cols_;
  std::vector<int> indptr_;
  std::vector<int> indices_;
};

struct SparseOperator {
  std::shared_ptr<const SparsityPattern> pattern;
  std::vector<double> values;

  SparseOperator() = default;
  explicit SparseOperator(std::shared_ptr<const SparsityPattern> p)
      : pattern(std::move(p)), values(pattern->nnz(), 0.0) {}

  int rows() const { return pattern ? pattern->rows() : 0; }
  int cols() const { return pattern ? pattern->cols() : 0; }

  double coeff(int i, int j) const;
  void multiply(const Vector& x, Vector& y) const;
  Vector operator*(const Vector& x) const;
  Matrix operator*(const Matrix& x) const;
  double max_abs() const;
  // Largest |A_ij - A_ji| over stored entries.
  double asymmetry() const;

  EigenSparse to_eigen() const;
  Matrix to_dense() const;
};

// a + s * b on the same pattern.
SparseOperator axpy(const SparseOperator& a, double s, const SparseOperator& b);

// Symmetric elimination: constrained rows and columns become identity, the
// right-hand side takes values[d] at constrained dofs and the lifting
// contribution elsewhere.
struct DirichletSystem {
  SparseOperator matrix;
  Vector rhs;
};
DirichletSystem apply_dirichlet(const SparseOperator& a, const Vector& rhs,
                                std::span<const int> constrained, const Vector& values);

// In place: zero constrained rows/columns and put 1 on their diagonal.
void eliminate_constrained(SparseOperator& a, const std::vector<char>& is_constrained);

// Sparse LDL^T of a symmetric matrix. The symbolic analysis is reused as long
// as the pattern object does not change.
class SymmetricSolver {
 public:
  void factorize(const SparseOperator& a);
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;

 private:
  Eigen::SimplicialLDLT<EigenSparse, Eigen::Lower> ldlt_;
  std::shared_ptr<const SparsityPattern> analyzed_;
};

}  // namespace crbm
