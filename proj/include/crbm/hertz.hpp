#pragma once

#include "crbm/fem.hpp"
#include "crbm/mesh.hpp"
#include "crbm/nitsche.hpp"

#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace crbm {

struct HertzConfig {
  double R2 = 1.0;
  double g0 = 0.001;
  double d = 0.09;
  double mu_min = 0.7;
  double mu_max = 1.3;
  MaterialParams material = MaterialParams::from_young_poisson(15.0, 0.35);
  double gamma0_factor = 50.0;
  FrictionModel friction;
  AngleInterval contact_arc{-0.625 * std::numbers::pi, -0.375 * std::numbers::pi};
  double h_target = 0.01;
  int degree = 2;
  MeshGrading grading;
  double char_length = 1.0;

  void validate() const;
  NitscheParams nitsche() const { return {gamma0_factor * material.lame_mu, h_target}; }
};

// Distance along n from x to the rigid disk of radius R2 centered at
// (0, -(mu + g0 + R2)); 1e3 when the ray misses it.
struct RigidDiskGap {
  double mu = 1.0;
  double g0 = 0.001;
  double R2 = 1.0;

  static constexpr double kNoIntersection = 1e3;
  double operator()(const Vec2& x, const Vec2& n) const;
};

// Everything assembled at one parameter value. Owns the mapped space that
// the problem points into.
struct HertzInstance {
  double mu = 1.0;
  std::unique_ptr<FeSpace> space;
  GapField gap;
  NitscheProblem problem;
};

// Reference mesh and space of one discretization, shared by all mu.
class HertzModel {
 public:
  explicit HertzModel(HertzConfig cfg);
  HertzModel(HertzConfig cfg, const Mesh& reference_mesh);

  const HertzConfig& config() const { return cfg_; }
  const FeSpace& reference_space() const { return *reference_; }
  GeometricMapping mapping(double mu) const { return {mu, reference_->mesh.arc_center}; }
  RigidDiskGap gap(double mu) const { return {mu, cfg_.g0, cfg_.R2}; }

  HertzInstance instance(double mu, const FrictionModel& friction, Exec exec = Exec::Parallel) const;
  HertzInstance instance(double mu, Exec exec = Exec::Parallel) const { return instance(mu, cfg_.friction, exec); }

  // Parameter-independent pieces: A(mu) = K - C / mu, W(mu) = mu^2 M + l^2 L.
  SparseOperator reference_stiffness() const;
  SparseOperator reference_correction(bool tangential) const;  // full pattern
  SparseOperator reference_mass() const;
  SparseOperator reference_laplacian() const;
  Vector dirichlet() const;

 private:
  HertzConfig cfg_;
  std::shared_ptr<FeSpace> reference_;
};

// Relative l2 error of sigma_nn against [P_g]_- at the contact nodes.
double error_alart_curnier_normal(const FeSpace& space, const MaterialParams& mat, double gamma,
                                  const GapField& gap, const Vector& U);
// Tangential counterpart with the threshold per contact node; the
// denominator stays ||sigma_nn||.
double error_alart_curnier_tangential(const FeSpace& space, const MaterialParams& mat, double gamma,
                                      const std::vector<double>& node_threshold, const Vector& U);
// Overload for a constant threshold.
double error_alart_curnier_tangential(const FeSpace& space, const MaterialParams& mat, double gamma, double s,
                                      const Vector& U);

// nu_F |[P_g]_-| at the contact nodes of U: the Coulomb threshold field in
// nodal sampling.
std::vector<double> coulomb_node_threshold(const FeSpace& space, const MaterialParams& mat, double gamma,
                                           const GapField& gap, double nu_F, const Vector& U);

struct RbErrors {
  double e_u = 0.0;
  double e_nn = 0.0;
  double e_nt = 0.0;
};

RbErrors rb_error_metrics(const FeSpace& space, const MaterialParams& mat, const SparseOperator& gram,
                          const Vector& hf, const Vector& rb);

// "start:step:count" grid.
std::vector<double> parse_grid(const std::string& spec);
// Uniform draws in [lo, hi) from a 64-bit Mersenne twister.
std::vector<double> uniform_draws(double lo, double hi, int count, std::uint64_t seed);

struct StudyCell {
  double mu = 0.0;
  double h = 0.0;
  double e_ac = 0.0;
  int k_cv = 0;
  int n_dof = 0;
  bool converged = false;
};

struct StudyTable {
  std::vector<double> mus;
  std::vector<double> hs;
  std::vector<StudyCell> cells;  // mu-major
  // Log-ratio orders between successive h, per mu; empty for one h.
  std::vector<std::vector<double>> orders;
};

// e_AC^n (frictionless) or e_AC^{ntau,T} (Tresca) over a (mu, h) grid.
StudyTable convergence_study(const HertzConfig& cfg, const std::vector<double>& mus, const std::vector<double>& hs);

}  // namespace crbm
