#pragma once

#include "crbm/errors.hpp"
#include "crbm/fem.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace crbm {

inline double neg_part(double z) { return z < 0.0 ? z : 0.0; }

// H(z) = 1 for z >= 0.
inline double heaviside(double z) { return z >= 0.0 ? 1.0 : 0.0; }

// Projection onto [-r, r]; r = 0 is accepted and gives 0.
double proj_ball(double x, double r);

// Derivative of proj_ball in x: 1 inside the ball, 0 outside.
double ball_proj_jacobian(double x, double s);

struct NitscheParams {
  double gamma0 = 0.0;
  double mesh_size_h = 0.0;

  double gamma() const { return gamma0 / mesh_size_h; }
};

enum class FrictionKind { Frictionless, Tresca, Coulomb };

struct FrictionModel {
  FrictionKind kind = FrictionKind::Frictionless;
  double threshold = 0.0;    // Tresca s
  double coefficient = 0.0;  // Coulomb nu_F

  static FrictionModel frictionless() { return {}; }
  static FrictionModel tresca(double s);
  static FrictionModel coulomb(double nu_F);

  bool tangential() const { return kind != FrictionKind::Frictionless; }
};

const char* friction_name(FrictionKind kind);

// g(x, n) for a point x on the contact boundary with outward normal n.
using GapFunction = std::function<double(const Vec2&, const Vec2&)>;

struct GapField {
  std::vector<double> qp;    // per contact quadrature point
  std::vector<double> node;  // per contact node
};

GapField make_gap_field(const FeSpace& space, const GapFunction& gap);

struct ContactTrace {
  std::vector<double> sigma_nn, sigma_nt, v_n, v_t;
  std::vector<double> P_n_gamma_g, P_n_gamma_0, P_tau;
};

// Pointwise data needed to evaluate the contact terms on one mapped space.
struct ContactSetup {
  const FeSpace* space = nullptr;
  MaterialParams material;
  double gamma = 0.0;
  FrictionModel friction;
  std::vector<double> gap;        // per contact quadrature point
  std::vector<double> threshold;  // slip threshold per contact quadrature point
  std::vector<TraceFunctionals> functionals;
  std::vector<int> offsets;  // first quadrature point of each contact element

  std::size_t num_points() const { return gap.size(); }
};

ContactSetup make_contact_setup(const FeSpace& space, const MaterialParams& mat, const NitscheParams& nitsche,
                                const FrictionModel& friction, const GapField& gap);

constexpr int kMaxEdgePoints = 8;

// Contact integrands of one element at a given state, weights included.
struct ElementContactState {
  int n_dofs = 0;
  int n_points = 0;
  std::array<double, kMaxEdgePoints> b_n{}, b_t{};    // w H(-P_g)/gamma, w G_s(P_tau)/gamma
  std::array<double, kMaxEdgePoints> th_n{}, th_t{};  // w [P_g]_-/gamma, w [P_tau]_s/gamma
  std::array<std::array<double, kMaxLocalDofs>, kMaxEdgePoints> p0{}, pt{};
};

ElementContactState contact_element_state(const ContactSetup& setup, std::size_t element, const double* w_local);
// Same, from per-point data of a single element (functionals, gap and
// threshold point at its first quadrature point).
ElementContactState contact_element_state(const ContactElement& ce, const TraceFunctionals* functionals,
                                          const double* gap, const double* threshold, double gamma,
                                          bool tangential, int n_dofs, const double* w_local);

// Local entries; the full assemblies below are built from these same calls.
double contact_tangent_entry(const ElementContactState& st, int a, int b);
double contact_theta_n_entry(const ElementContactState& st, int a);
double contact_theta_t_entry(const ElementContactState& st, int a);

ContactTrace eval_contact_traces(const ContactSetup& setup, const Vector& U);

// Elasticity minus the 1/gamma normal-trace correction (sigma_nn only when
// frictionless, the full sigma n otherwise).
SparseOperator assemble_A_gamma(const FeSpace& space, const MaterialParams& mat, const NitscheParams& nitsche,
                                const FrictionModel& friction, Exec exec = Exec::Parallel);
// The boundary correction alone, int (1/gamma) sigma . sigma, on the contact pattern.
SparseOperator assemble_nitsche_correction(const FeSpace& space, const MaterialParams& mat, double gamma,
                                           bool tangential);

// On the contact pattern.
SparseOperator assemble_B_gamma(const ContactSetup& setup, const Vector& w);

struct ThetaVectors {
  Vector normal;
  Vector tangential;  // zero when frictionless
};
ThetaVectors assemble_Theta_gamma(const ContactSetup& setup, const Vector& w);

// Adds a contact-pattern operator into a full-pattern copy of base.
SparseOperator add_contact_block(const FeSpace& space, const SparseOperator& base, const SparseOperator& block);

struct NitscheProblem {
  const FeSpace* space = nullptr;
  ContactSetup contact;
  SparseOperator stiffness;  // elasticity
  SparseOperator a_gamma;    // elasticity minus the Nitsche correction
  SparseOperator gram;       // V(mu) inner product
  Vector load;
  Vector dirichlet;  // prescribed values on Dirichlet dofs, zero elsewhere
};

Vector residual(const NitscheProblem& problem, const Vector& w, bool zero_dirichlet = true);
SparseOperator tangent(const NitscheProblem& problem, const Vector& w);

struct Energies {
  double J = 0.0;
  double J_nitsche = 0.0;
  double J_friction = 0.0;  // equals J_nitsche when frictionless
};
Energies energy(const NitscheProblem& problem, const Vector& U);

struct SolverConfig {
  double delta_u = 1e-8;
  int max_iter = 50;
  std::optional<Vector> U0;
  bool keep_iterates = true;
};

struct SolveState {
  Vector U;
  int k = 0;
  std::vector<double> residual_history;  // relative increments, one per iteration
};

struct SolveResult {
  Vector U_cv;
  int k_cv = 0;
  bool converged = false;
  std::vector<Vector> iterates;  // U_0 .. U_kcv
  std::vector<double> residual_history;
  int outer_iterations = 0;  // Coulomb only
  std::vector<double> threshold;  // Coulomb: converged threshold field per quadrature point
};

struct NonConvergence : Error {
  NonConvergence(const std::string& what, SolveState s) : Error(what), state(std::move(s)) {}
  SolveState state;
};

double gram_norm(const SparseOperator& W, const Vector& v);

// Linear elasticity with the Dirichlet data, contact dropped.
Vector solve_linear_elasticity(const NitscheProblem& problem);

SolveResult solve_nitsche(const NitscheProblem& problem, const SolverConfig& config = {});

struct CoulombConfig {
  double delta_fp = 1e-6;
  int max_outer = 100;
  SolverConfig inner;
};

// Fixed point over Tresca solves with threshold nu_F |[P_g]_-| frozen from the
// previous outer iterate. The first threshold comes from the frictionless
// solution and the first inner Newton starts from the fully stuck state.
SolveResult solve_coulomb(const NitscheProblem& problem, const CoulombConfig& config = {});

}  // namespace crbm
