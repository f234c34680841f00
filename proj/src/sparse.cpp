#include "crbm/sparse.hpp"

#include "crbm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace crbm {

SparsityPattern::SparsityPattern(int n_rows, int n_cols, std::vector<int> indptr, std::vector<int> indices)
    : n_rows_(n_rows), n_cols_(n_cols), indptr_(std::move(indptr)), indices_(std::move(indices)) {
  if (indptr_.size() != static_cast<std::size_t>(n_rows_) + 1 ||
      static_cast<std::size_t>(indptr_.back()) != indices_.size()) {
    throw InvalidArgument("sparse: inconsistent CSR arrays");
  }
}

std::shared_ptr<const SparsityPattern> SparsityPattern::from_blocks(
    int n, const std::vector<std::vector<int>>& blocks) {
  std::vector<std::vector<int>> rows(n);
  for (const auto& b : blocks) {
    for (int i : b) rows[i].insert(rows[i].end(), b.begin(), b.end());
  }
  std::vector<int> indptr(n + 1, 0);
  std::vector<int> indices;
  for (int i = 0; i < n; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    indices.insert(indices.end(), r.begin(), r.end());
    indptr[i + 1] = static_cast<int>(indices.size());
    std::vector<int>().swap(r);
  }
  return std::make_shared<SparsityPattern>(n, n, std::move(indptr), std::move(indices));
}

std::ptrdiff_t SparsityPattern::find(int i, int j) const {
  if (i < 0 || i >= n_rows_) return -1;
  const auto first = indices_.begin() + indptr_[i];
  const auto last = indices_.begin() + indptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return it - indices_.begin();
}

double SparseOperator::coeff(int i, int j) const {
  const auto p = pattern->find(i, j);
  return p < 0 ? 0.0 : values[p];
}

void SparseOperator::multiply(const Vector& x, Vector& y) const {
  const auto& ip = pattern->indptr();
  const auto& ix = pattern->indices();
  y.setZero(rows());
  for (int i = 0; i < rows(); ++i) {
    double s = 0.0;
    for (int p = ip[i]; p < ip[i + 1]; ++p) s += values[p] * x[ix[p]];
    y[i] = s;
  }
}

Vector SparseOperator::operator*(const Vector& x) const {
  Vector y;
  multiply(x, y);
  return y;
}

Matrix SparseOperator::operator*(const Matrix& x) const {
  const auto& ip = pattern->indptr();
  const auto& ix = pattern->indices();
  Matrix y = Matrix::Zero(rows(), x.cols());
  for (int c = 0; c < x.cols(); ++c) {
    for (int i = 0; i < rows(); ++i) {
      double s = 0.0;
      for (int p = ip[i]; p < ip[i + 1]; ++p) s += values[p] * x(ix[p], c);
      y(i, c) = s;
    }
  }
  return y;
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double SparseOperator::asymmetry() const {
  const auto& ip = pattern->indptr();
  const auto& ix = pattern->indices();
  double m = 0.0;
  for (int i = 0; i < rows(); ++i) {
    for (int p = ip[i]; p < ip[i + 1]; ++p) {
      m = std::max(m, std::abs(values[p] - coeff(ix[p], i)));
    }
  }
  return m;
}

EigenSparse SparseOperator::to_eigen() const {
  std::vector<Eigen::Triplet<double, int>> trips;
  trips.reserve(values.size());
  const auto& ip = pattern->indptr();
  const auto& ix = pattern->indices();
  for (int i = 0; i < rows(); ++i) {
    for (int p = ip[i]; p < ip[i + 1]; ++p) trips.emplace_back(i, ix[p], values[p]);
  }
  EigenSparse m(rows(), cols());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Matrix SparseOperator::to_dense() const {
  Matrix m = Matrix::Zero(rows(), cols());
  const auto& ip = pattern->indptr();
  const auto& ix = pattern->indices();
  for (int i = 0; i < rows(); ++i) {
    for (int p = ip[i]; p < ip[i + 1]; ++p) m(i, ix[p]) = values[p];
  }
  return m;
}

SparseOperator axpy(const SparseOperator& a, double s, const SparseOperator& b) {
  if (a.pattern != b.pattern) throw InvalidArgument("sparse: axpy needs a shared pattern");
  SparseOperator out = a;
  for (std::size_t p = 0; p < out.values.size(); ++p) out.values[p] += s * b.values[p];
  return out;
}

void eliminate_constrained(SparseOperator& a, const std::vector<char>& is_constrained) {
  const auto& ip = a.pattern->indptr();
  const auto& ix = a.pattern->indices();
  for (int i = 0; i < a.rows(); ++i) {
    for (int p = ip[i]; p < ip[i + 1]; ++p) {
      const int j = ix[p];
      if (is_constrained[i] || is_constrained[j]) a.values[p] = (i == j) ? 1.0 : 0.0;
    }
  }
}

DirichletSystem apply_dirichlet(const SparseOperator& a, const Vector& rhs, std::span<const int> constrained,
                                const Vector& values) {
  const int n = a.rows();
  std::vector<char> flag(n, 0);
  Vector lift = Vector::Zero(n);
  for (int d : constrained) {
    flag[d] = 1;
    lift[d] = values[d];
  }
  DirichletSystem out{a, rhs - a * lift};
  for (int d : constrained) out.rhs[d] = values[d];
  eliminate_constrained(out.matrix, flag);
  return out;
}

void SymmetricSolver::factorize(const SparseOperator& a) {
  // CSR of a symmetric matrix is its own CSC.
  const Eigen::Map<const EigenSparse> m(a.rows(), a.cols(), static_cast<int>(a.values.size()),
                                        a.pattern->indptr().data(), a.pattern->indices().data(),
                                        a.values.data());
  if (analyzed_ != a.pattern) {
    ldlt_.analyzePattern(m);
    analyzed_ = a.pattern;
  }
  ldlt_.factorize(m);
  if (ldlt_.info() != Eigen::Success) throw SingularTangent("solver: factorization failed");
  const auto& d = ldlt_.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i]) || std::abs(d[i]) <= 1e-14 * dmax) throw SingularTangent("solver: singular pivot");
  }
}

Vector SymmetricSolver::solve(const Vector& b) const { return ldlt_.solve(b); }

Matrix SymmetricSolver::solve(const Matrix& b) const { return ldlt_.solve(b); }

}  // namespace crbm
