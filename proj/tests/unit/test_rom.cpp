#include "crbm/rom.hpp"

#include <cmath>
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace crbm;

namespace {

// Dense SPD matrix stored with a full pattern.
SparseOperator dense_operator(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> ptr{0}, idx;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) idx.push_back(j);
    ptr.push_back(static_cast<int>(idx.size()));
  }
  SparseOperator op(std::make_shared<SparsityPattern>(n, n, ptr, idx));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) op.values[i * n + j] = a(i, j);
  }
  return op;
}

struct Fixture {
  int n = 40;
  int P = 12;
  Matrix W;
  SnapshotSet snaps;

  explicit Fixture(int rank = 12, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix B(n, n);
    for (auto& x : B.reshaped()) x = g(rng);
    W = B * B.transpose() / n + Matrix::Identity(n, n);
    Matrix basis(n, rank);
    for (auto& x : basis.reshaped()) x = g(rng);
    snaps.lift = Vector::Zero(n);
    for (int p = 0; p < P; ++p) {
      Vector c(rank);
      for (auto& x : c) x = g(rng) * std::pow(0.3, p % rank);
      snaps.parameters.push_back(1.0 + 0.01 * p);
      snaps.snapshots.push_back(basis * c);
    }
  }
};

}  // namespace

TEST_CASE("POD matches the method of snapshots") {
  Fixture f;
  const auto basis = pod(f.snaps, dense_operator(f.W), PodTarget::full_rank());

  // Oracle: eigen-decomposition of the correlation matrix Y^T W Y.
  Matrix Y(f.n, f.P);
  for (int p = 0; p < f.P; ++p) Y.col(p) = f.snaps.snapshots[p];
  Eigen::SelfAdjointEigenSolver<Matrix> es(Y.transpose() * f.W * Y);
  const Vector lam = es.eigenvalues().reverse();
  REQUIRE(basis.rank() == f.P);
  for (int i = 0; i < f.P; ++i) {
    CHECK(basis.singular_values[i] == doctest::Approx(std::sqrt(lam[i])).epsilon(1e-8));
  }

  const Matrix G = basis.Z.transpose() * f.W * basis.Z;
  CHECK((G - Matrix::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() <= 1e-12);

  // Same leading subspaces: compare the W-orthogonal projectors.
  const Matrix V = es.eigenvectors().rowwise().reverse();
  for (int N : {1, 3, 6}) {
    Matrix Zo(f.n, N);
    for (int i = 0; i < N; ++i) Zo.col(i) = Y * V.col(i) / std::sqrt(lam[i]);
    const Matrix Pz = basis.Z.leftCols(N) * basis.Z.leftCols(N).transpose() * f.W;
    const Matrix Po = Zo * Zo.transpose() * f.W;
    CHECK((Pz - Po).cwiseAbs().maxCoeff() <= 1e-8);
  }

  // Sign convention.
  for (int i = 0; i < basis.size(); ++i) {
    Eigen::Index k;
    basis.Z.col(i).cwiseAbs().maxCoeff(&k);
    CHECK(basis.Z(k, i) > 0.0);
  }
}

TEST_CASE("POD targets and rank") {
  Fixture f(5);
  const auto op = dense_operator(f.W);
  const auto full = pod(f.snaps, op, PodTarget::full_rank());
  CHECK(full.rank() == 5);
  CHECK(full.size() == 5);
  CHECK(pod(f.snaps, op, PodTarget::modes(3)).size() == 3);
  CHECK_THROWS_AS(pod(f.snaps, op, PodTarget::modes(6)), RankDeficient);

  const auto tol = pod(f.snaps, op, PodTarget::energy(1e-2));
  const auto& sv = full.singular_values;
  const double total = sv.squaredNorm();
  const int N = tol.size();
  CHECK(std::sqrt(sv.tail(sv.size() - N).squaredNorm() / total) <= 1e-2);
  CHECK(std::sqrt(sv.tail(sv.size() - N + 1).squaredNorm() / total) > 1e-2);

  // The lifting is subtracted before compression.
  SnapshotSet lifted = f.snaps;
  lifted.lift = Vector::Constant(f.n, 3.0);
  for (auto& s : lifted.snapshots) s += lifted.lift;
  const auto b2 = pod(lifted, op, PodTarget::full_rank());
  CHECK((b2.Z - full.Z).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(b2.reconstruct(Vector::Zero(5)) == lifted.lift);
}

TEST_CASE("POD projection error") {
  Fixture f(8);
  const auto op = dense_operator(f.W);
  const auto basis = pod(f.snaps, op, PodTarget::full_rank());
  const std::vector<SparseOperator> grams(f.P, op);
  const auto e = pod_projection_error(f.snaps, basis, grams);
  REQUIRE(e.size() == 8);
  for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i].e_pod <= e[i - 1].e_pod + 1e-15);
  CHECK(e.back().e_pod <= 1e-12);
  // With the POD Gram the error is the singular value tail.
  const auto& sv = basis.singular_values;
  for (const auto& pt : e) {
    const double tail = std::sqrt(sv.tail(sv.size() - pt.N).squaredNorm() / sv.squaredNorm());
    CHECK(std::abs(pt.e_pod - tail) <= 1e-6 * tail + 1e-12);
  }
}

TEST_CASE("snapshot set validation") {
  SnapshotSet s;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.parameters = {1.0, 1.0};
  s.snapshots = {Vector::Ones(3), Vector::Ones(3)};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.parameters = {1.0, 2.0};
  s.snapshots[1] = Vector::Ones(4);
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("reduced dense solve") {
  Matrix a(2, 2);
  a << 2, 1, 1, 3;
  const Vector x = solve_reduced_system(a, Vector::Ones(2));
  CHECK((a * x - Vector::Ones(2)).norm() <= 1e-14);
  CHECK_THROWS_AS(solve_reduced_system(Matrix::Zero(2, 2), Vector::Ones(2)), SingularTangent);
}
