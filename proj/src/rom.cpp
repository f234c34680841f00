#include "crbm/rom.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace crbm {

void SnapshotSet::validate() const {
  if (snapshots.empty()) throw InvalidArgument("pod: empty snapshot set");
  if (parameters.size() != snapshots.size()) throw InvalidArgument("pod: parameter count mismatch");
  const auto n = snapshots.front().size();
  for (const auto& s : snapshots) {
    if (s.size() != n) throw InvalidArgument("pod: snapshots differ in length");
  }
  if (lift.size() != 0 && lift.size() != n) throw InvalidArgument("pod: lift length mismatch");
  if (std::set<double>(parameters.begin(), parameters.end()).size() != parameters.size()) {
    throw InvalidArgument("pod: repeated parameter value");
  }
}

Vector ReducedBasis::reconstruct(const Vector& coeffs) const {
  if (coeffs.size() != Z.cols()) throw InvalidArgument("basis: coefficient count mismatch");
  Vector u = Z * coeffs;
  if (lift.size() != 0) u += lift;
  return u;
}

ReducedBasis ReducedBasis::truncated(int n) const {
  if (n < 1 || n > size()) throw InvalidArgument("basis: cannot truncate to " + std::to_string(n) + " modes");
  ReducedBasis out;
  out.Z = Z.leftCols(n);
  out.lift = lift;
  out.singular_values = singular_values;
  out.gram_used = gram_used;
  return out;
}

namespace {

Matrix lifted_snapshots(const SnapshotSet& snaps) {
  const auto n = snaps.snapshots.front().size();
  Matrix Y(n, snaps.size());
  for (std::size_t p = 0; p < snaps.size(); ++p) {
    Y.col(p) = snaps.snapshots[p];
    if (snaps.lift.size() != 0) Y.col(p) -= snaps.lift;
  }
  return Y;
}

}  // namespace

ReducedBasis pod(const SnapshotSet& snaps, const SparseOperator& gram, const PodTarget& target,
                 std::string gram_name) {
  snaps.validate();
  const Matrix Y = lifted_snapshots(snaps);
  if (gram.rows() != Y.rows()) throw InvalidArgument("pod: gram size mismatch");

  // W = P^T L L^T P, so the W-inner product of Y is the Euclidean one of L^T P Y.
  const EigenSparse W = gram.to_eigen();
  Eigen::SimplicialLLT<EigenSparse, Eigen::Lower> llt(W);
  if (llt.info() != Eigen::Success) throw InvalidArgument("pod: gram matrix is not positive definite");
  const Matrix X = llt.matrixU() * (llt.permutationP() * Y);
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();

  int rank = 0;
  const double smax = sv.size() ? sv[0] : 0.0;
  while (rank < sv.size() && smax > 0.0 && sv[rank] >= kPodRankTolerance * smax) ++rank;

  int n = target.size;
  if (target.size < 0 || target.tolerance < 0.0) throw InvalidArgument("pod: negative target");
  if (n == 0 && target.tolerance == 0.0) {
    n = rank;
  } else if (n == 0) {
    double total = 0.0;
    for (int i = 0; i < rank; ++i) total += sv[i] * sv[i];
    double tail = total;
    n = 0;
    while (n < rank && std::sqrt(std::max(tail, 0.0) / total) > target.tolerance) {
      tail -= sv[n] * sv[n];
      ++n;
    }
    n = std::max(n, 1);
  }
  if (n > rank) {
    throw RankDeficient("pod: requested " + std::to_string(n) + " modes but numerical rank is " +
                        std::to_string(rank));
  }

  Matrix Z = llt.permutationPinv() * Matrix(llt.matrixU().solve(svd.matrixU().leftCols(n)));
  // Lifted snapshots vanish on constrained rows, so the modes do as well.
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    if (Y.row(i).cwiseAbs().maxCoeff() == 0.0) Z.row(i).setZero();
  }
  // One Cholesky-QR pass in the W inner product to restore orthonormality.
  const Matrix G = Z.transpose() * (gram * Z);
  Eigen::LLT<Matrix> g(G);
  Z = g.matrixU().solve<Eigen::OnTheRight>(Z);

  for (int j = 0; j < n; ++j) {
    Eigen::Index imax = 0;
    Z.col(j).cwiseAbs().maxCoeff(&imax);
    if (Z(imax, j) < 0.0) Z.col(j) = -Z.col(j);
  }

  ReducedBasis b;
  b.Z = std::move(Z);
  b.lift = snaps.lift.size() ? snaps.lift : Vector::Zero(Y.rows());
  b.singular_values = sv.head(rank);
  b.gram_used = std::move(gram_name);
  return b;
}

std::vector<PodErrorPoint> pod_projection_error(const SnapshotSet& snaps, const ReducedBasis& basis,
                                                const std::vector<SparseOperator>& grams) {
  snaps.validate();
  if (grams.size() != snaps.size()) throw InvalidArgument("pod: one gram per snapshot required");
  const int nmax = basis.size();
  std::vector<double> num(nmax, 0.0);
  double den = 0.0;
  for (std::size_t p = 0; p < snaps.size(); ++p) {
    const SparseOperator& W = grams[p];
    const Vector& u = snaps.snapshots[p];
    const Vector y = basis.lift.size() ? Vector(u - basis.lift) : u;
    den += u.dot(W * u);
    const Matrix WZ = W * basis.Z;
    const Vector Wy = W * y;
    const Matrix G = basis.Z.transpose() * WZ;
    const Vector rhs = WZ.transpose() * y;
    for (int n = 1; n <= nmax; ++n) {
      const Vector c = G.topLeftCorner(n, n).ldlt().solve(rhs.head(n));
      const Vector e = y - basis.Z.leftCols(n) * c;
      const Vector We = Wy - WZ.leftCols(n) * c;
      num[n - 1] += std::max(0.0, e.dot(We));
    }
  }
  std::vector<PodErrorPoint> out;
  for (int n = 1; n <= nmax; ++n) out.push_back({n, den > 0.0 ? std::sqrt(num[n - 1] / den) : 0.0});
  return out;
}

Matrix project(const ReducedBasis& basis, const SparseOperator& a) {
  if (a.rows() != basis.dofs()) throw InvalidArgument("project: dimension mismatch");
  return basis.Z.transpose() * (a * basis.Z);
}

Vector project(const ReducedBasis& basis, const Vector& v) {
  if (v.size() != basis.dofs()) throw InvalidArgument("project: dimension mismatch");
  return basis.Z.transpose() * v;
}

ReducedArrays project_arrays(const ReducedBasis& basis, const SparseOperator& a,
                             const std::vector<SparseOperator>& b, const Vector& r) {
  ReducedArrays out;
  out.A_N = project(basis, a);
  for (const auto& bi : b) out.B_N.push_back(project(basis, bi));
  out.R_N = project(basis, r);
  return out;
}

Vector solve_reduced_system(const Matrix& a, const Vector& b) {
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw SingularTangent("reduced: singular tangent");
  Vector x = lu.solve(b);
  if (!x.allFinite()) throw SingularTangent("reduced: non-finite update");
  return x;
}

ReducedSolution solve_reduced_naive(const ReducedBasis& basis, const NitscheProblem& problem,
                                    const SolverConfig& config) {
  if (basis.size() < 1) throw InvalidArgument("reduced: empty basis");
  if (!(config.delta_u > 0.0) || config.max_iter < 1) throw InvalidArgument("solver: invalid configuration");
  const Matrix& Z = basis.Z;
  const Vector& lift = basis.lift;
  const Matrix A_N = project(basis, problem.a_gamma);

  ReducedSolution out;
  Vector c = solve_reduced_system(A_N, Z.transpose() * (problem.load - problem.a_gamma * lift));
  Vector U = basis.reconstruct(c);
  for (int k = 0; k < config.max_iter; ++k) {
    const Vector R = residual(problem, U);
    const Matrix J = project(basis, tangent(problem, U));
    const Vector dc = solve_reduced_system(J, -(Z.transpose() * R));
    c += dc;
    U = basis.reconstruct(c);
    const double nu = gram_norm(problem.gram, U);
    const double rel = nu > 0.0 ? gram_norm(problem.gram, Z * dc) / nu : std::numeric_limits<double>::infinity();
    if (!std::isfinite(rel)) break;
    out.residual_history.push_back(rel);
    if (rel <= config.delta_u) {
      out.coeffs = c;
      out.U = U;
      out.k_cv = k + 1;
      out.converged = true;
      return out;
    }
  }
  throw NonConvergence("reduced: no convergence within " + std::to_string(config.max_iter) + " iterations",
                       SolveState{U, static_cast<int>(out.residual_history.size()), out.residual_history});
}

}  // namespace crbm
