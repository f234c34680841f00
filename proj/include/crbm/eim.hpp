#pragma once

#include "crbm/hertz.hpp"
#include "crbm/nitsche.hpp"
#include "crbm/rom.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace crbm {

enum class EimKind : std::uint8_t { Matrix = 0, Vector = 1 };

// Address of an operator entry: (row, col) for matrices, (row, -1) for vectors.
using EntryAddress = std::array<int, 2>;

// Members of a (mu, k)-indexed family restricted to a fixed set of entries.
struct EimFamily {
  EimKind kind = EimKind::Matrix;
  std::vector<EntryAddress> addresses;  // one per row of members
  Matrix members;                       // positions x members
  std::vector<std::array<int, 2>> labels;  // (parameter index, k) per member
};

struct EimConfig {
  double delta = 1e-6;
  int max_terms = 2000;

  void validate() const;
};

struct EimDecomposition {
  EimKind kind = EimKind::Matrix;
  std::vector<EntryAddress> addresses;
  Matrix terms;              // positions x S, term s equals 1 at indices[s]
  std::vector<int> indices;  // selected positions
  Matrix Q;                  // Q(i, j) = terms(indices[i], j); unit lower-triangular
  // Max relative residual over the family with s = 0..S terms.
  std::vector<double> training_log;
  double reference_norm = 0.0;  // max sup-norm over the training family

  int size() const { return static_cast<int>(indices.size()); }
  EntryAddress entry(int s) const { return addresses[indices[s]]; }
};

// Greedy EIM. Members are scanned in column order; ties go to the first
// member and then to the first position.
EimDecomposition eim_train(const EimFamily& family, const EimConfig& config);

// alpha = Q^{-1} T by forward substitution; T may hold fewer than S values,
// in which case the leading block is used.
Vector eim_online_coeffs(const EimDecomposition& d, const Vector& T);

// terms * alpha over the full position set.
Vector eim_interpolate(const EimDecomposition& d, const Vector& T);

// max_m |m - I_S m|_inf / max_m |m|_inf for S = 0..d.size(), over the columns
// of members.
std::vector<double> eim_error_curve(const EimDecomposition& d, const Matrix& members);

// The contact operators that carry a (mu, k) dependence.
enum class ContactOperator : std::uint8_t { Tangent = 0, ThetaNormal = 1, ThetaTangential = 2 };

const char* contact_operator_name(ContactOperator op);

// Entry addresses of the contact-supported part of op: the contact pattern in
// CSR order for the tangent, the contact support dofs for the vectors.
std::vector<EntryAddress> contact_addresses(const FeSpace& space, ContactOperator op);
// Values of op at the state w on those addresses.
Vector contact_member(const ContactSetup& setup, ContactOperator op, const Vector& w);

// Contact data of selected elements of the mapped space at one parameter.
struct LocalContact {
  std::vector<int> elements;
  std::vector<ContactElement> mapped;
  std::vector<std::vector<TraceFunctionals>> functionals;
  std::vector<std::vector<double>> gap;
  std::vector<std::vector<double>> threshold;
  double gamma = 0.0;
  bool tangential = false;
  int n_local_dofs = 0;
};

LocalContact make_local_contact(const FeSpace& reference, std::vector<int> elements, const GeometricMapping& map,
                                const MaterialParams& mat, double gamma, const FrictionModel& friction,
                                const GapFunction& gap);

using LocalField = std::array<double, kMaxLocalDofs>;

std::vector<ElementContactState> local_states(const LocalContact& local, const std::vector<LocalField>& w);
std::vector<LocalField> gather_local(const FeSpace& space, const std::vector<int>& elements, const Vector& w);

// For each selected entry, the contact elements whose local assembly
// contributes to it, in ascending element order.
struct EntryEvaluator {
  struct Contribution {
    int element = 0;
    int a = 0;
    int b = 0;
  };
  ContactOperator op = ContactOperator::Tangent;
  std::vector<std::vector<Contribution>> entries;

  std::vector<int> elements() const;  // sorted union
  std::size_t visits() const;
  std::size_t max_elements_per_entry() const;
};

EntryEvaluator make_entry_evaluator(const FeSpace& space, const EimDecomposition& d, ContactOperator op);

// slot[e] is the position of contact element e in states, -1 when absent.
Vector evaluate_selected_entries(const EntryEvaluator& ev, const std::vector<int>& slot,
                                 const std::vector<ElementContactState>& states);
// Convenience path from a full field, used for checks.
Vector evaluate_selected_entries(const EntryEvaluator& ev, const LocalContact& local, const FeSpace& space,
                                 const Vector& w);

struct AffineExpansion {
  std::vector<Matrix> matrices;  // Z^T term_s Z
  Matrix vectors;                // column s = Z^T term_s
};

AffineExpansion reduce_expansion(const EimDecomposition& d, const FeSpace& space, const ReducedBasis& basis);

// Exact parametric pieces of the Hertz problem on the reduced space:
// A_N(mu) = K - C / mu, W_N(mu) = mu^2 M + l^2 L, with lift cross terms.
struct ReducedOperators {
  Matrix K, C, M, L;
  Vector k_lift, c_lift, m_lift, l_lift, f;
  double m_ll = 0.0;
  double l_ll = 0.0;
  double char_length = 1.0;
};

ReducedOperators reduce_hertz_operators(const HertzModel& model, const ReducedBasis& basis, bool tangential);

struct OnlineModel {
  const HertzModel* model = nullptr;
  FrictionModel friction;
  ReducedBasis basis;
  ReducedOperators ops;
  EimDecomposition b, theta_n, theta_t;
  AffineExpansion rb, rn, rt;
  EntryEvaluator eb, en, et;
  std::vector<int> elements;  // union over the evaluators
  std::vector<int> slot;      // contact element -> position in elements, or -1
  std::vector<Matrix> z_local;        // per element in elements: its rows of Z
  std::vector<LocalField> lift_local;  // per element: its lift values

  bool tangential() const { return friction.tangential(); }
};

OnlineModel make_online_model(const HertzModel& model, const FrictionModel& friction, ReducedBasis basis,
                              EimDecomposition b, EimDecomposition theta_n, EimDecomposition theta_t);

// Precomputed online pieces, as read back from a store.
struct OnlineParts {
  ReducedOperators ops;
  AffineExpansion rb, rn, rt;
  EntryEvaluator eb, en, et;
};

OnlineModel make_online_model(const HertzModel& model, const FrictionModel& friction, ReducedBasis basis,
                              EimDecomposition b, EimDecomposition theta_n, EimDecomposition theta_t,
                              OnlineParts parts);

struct OnlineTimings {
  double coefficients = 0.0;   // local entry evaluation and forward substitution
  double reduced_solve = 0.0;  // reduced assembly and dense solves
  double reconstruction = 0.0;
};

struct OnlineSolution : ReducedSolution {
  OnlineTimings timings;
  std::size_t element_visits = 0;  // per iteration
};

// N <= model.basis.size(); the leading N modes are used.
OnlineSolution solve_reduced_eim(const OnlineModel& model, double mu, int N, const SolverConfig& config = {});

}  // namespace crbm
