#pragma once

#include "crbm/nitsche.hpp"
#include "crbm/sparse.hpp"

#include <string>
#include <vector>

namespace crbm {

struct SnapshotSet {
  std::vector<double> parameters;
  std::vector<Vector> snapshots;                      // U_cv per parameter
  std::vector<std::vector<Vector>> iterate_snapshots;  // U_0 .. U_kcv per parameter
  FrictionModel friction;
  // Dirichlet lifting subtracted before compression; empty means zero.
  Vector lift;

  std::size_t size() const { return snapshots.size(); }
  // Throws InvalidArgument on empty sets, ragged lengths or repeated parameters.
  void validate() const;
};

// Both fields zero selects the numerical rank.
struct PodTarget {
  int size = 0;            // requested N when positive
  double tolerance = 0.0;  // otherwise smallest N with tail energy below this

  static PodTarget modes(int n) { return {n, 0.0}; }
  static PodTarget energy(double tol) { return {0, tol}; }
  static PodTarget full_rank() { return {0, 0.0}; }
};

struct ReducedBasis {
  Matrix Z;  // N^HF x N, columns orthonormal in the gram inner product
  Vector lift;
  Vector singular_values;  // all nonzero ones, not only the N kept
  std::string gram_used;

  int size() const { return static_cast<int>(Z.cols()); }
  int dofs() const { return static_cast<int>(Z.rows()); }
  int rank() const { return static_cast<int>(singular_values.size()); }
  Vector reconstruct(const Vector& coeffs) const;
  // First n modes.
  ReducedBasis truncated(int n) const;
};

// Relative singular value below which a direction counts as zero.
constexpr double kPodRankTolerance = 1e-14;

// Gram-weighted POD of the lifted snapshots. Modes are sorted by decreasing
// singular value and signed so the largest-magnitude entry is positive.
ReducedBasis pod(const SnapshotSet& snaps, const SparseOperator& gram, const PodTarget& target,
                 std::string gram_name = "H1_ref");

struct PodErrorPoint {
  int N = 0;
  double e_pod = 0.0;
};

// Projection error with the mapped Gram of each parameter, N = 1..basis.size().
std::vector<PodErrorPoint> pod_projection_error(const SnapshotSet& snaps, const ReducedBasis& basis,
                                                const std::vector<SparseOperator>& grams);

struct ReducedArrays {
  Matrix A_N;
  std::vector<Matrix> B_N;
  Vector R_N;
};

Matrix project(const ReducedBasis& basis, const SparseOperator& a);
Vector project(const ReducedBasis& basis, const Vector& v);
ReducedArrays project_arrays(const ReducedBasis& basis, const SparseOperator& a,
                             const std::vector<SparseOperator>& b, const Vector& r);

struct ReducedSolution {
  Vector coeffs;
  Vector U;  // lift + Z coeffs
  int k_cv = 0;
  bool converged = false;
  std::vector<double> residual_history;
};

// Reduced Galerkin Newton that reassembles B and the residual on the full
// mesh at every iterate.
ReducedSolution solve_reduced_naive(const ReducedBasis& basis, const NitscheProblem& problem,
                                    const SolverConfig& config = {});

// Dense solve of a small reduced Newton system; throws SingularTangent.
Vector solve_reduced_system(const Matrix& a, const Vector& b);

}  // namespace crbm
