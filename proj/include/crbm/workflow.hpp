#pragma once

#include "crbm/artifact.hpp"
#include "crbm/config.hpp"
#include "crbm/eim.hpp"
#include "crbm/hertz.hpp"
#include "crbm/rom.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace crbm {

using Logger = std::function<void(const std::string&)>;

// HF solves over a parameter list with every iterate and the contact
// operators evaluated at each of them.
struct TrainingData {
  SnapshotSet snaps;
  std::vector<int> k_cv;  // -1 on failure
  std::vector<double> e_ac;           // e_AC at the converged state, NaN on failure
  std::vector<std::string> failures;  // "mu: reason" for solves that failed
  // Indexed by ContactOperator, then parameter, then iterate k = 0..k_cv.
  std::array<std::vector<std::vector<Vector>>, 3> members;
};

TrainingData generate_training_data(const HertzModel& model, const std::vector<double>& mus,
                                    const SolverConfig& solver, const Logger& log = {});

// Members enumerated parameter-major then k ascending; converged_only keeps
// k = k_cv alone.
EimFamily make_family(const FeSpace& space, ContactOperator op, const TrainingData& data, bool converged_only);

struct OfflineArtifacts {
  RunConfig config;
  std::shared_ptr<HertzModel> model;
  SnapshotSet snaps;
  std::vector<int> k_cv;
  ReducedBasis basis;
  EimDecomposition b, theta_n, theta_t;
  ReducedOperators ops;
  AffineExpansion rb, rn, rt;
  EntryEvaluator eb, en, et;
};

// Throws NonConvergence naming the failed parameters.
OfflineArtifacts run_offline(const RunConfig& config, const Logger& log = {});

ArtifactStore to_store(const OfflineArtifacts& a);
OfflineArtifacts from_store(const ArtifactStore& store);

void store_mesh(ArtifactStore& store, const Mesh& mesh);
Mesh load_mesh(const ArtifactStore& store);

void store_eim(ArtifactStore& store, const std::string& prefix, const EimDecomposition& d);
EimDecomposition load_eim(const ArtifactStore& store, const std::string& prefix);

OnlineModel make_online_model(const OfflineArtifacts& a);

struct HfReport {
  double mu = 0.0;
  std::string friction;
  int n_dof = 0;
  int k_cv = 0;
  int outer_iterations = 0;
  bool converged = false;
  double e_ac_n = 0.0;
  double e_ac_nt = 0.0;  // NaN when frictionless
  Energies energy;
  BoundaryTrace trace;
  std::vector<Vec2> contact_x;  // contact node positions on the mapped mesh
  Vector U;
};

HfReport run_hf_solve(const RunConfig& config, double mu);
// hf_solve.csv row and hf_solution.bin in the report directory.
void write_hf_outputs(const RunConfig& config, const HfReport& r);

struct OnlineReport {
  double mu = 0.0;
  int N = 0;
  OnlineSolution solution;
  double e_snapshot = -1.0;  // error against the stored snapshot when mu is a training value
};

OnlineReport run_online(const OfflineArtifacts& a, const OnlineModel& m, double mu, int N);
void write_online_outputs(const RunConfig& config, const OnlineReport& r);

struct RbRecord {
  int N = 0;
  double mu = 0.0;
  bool naive_ok = false;
  bool eim_ok = false;
  RbErrors naive;
  RbErrors eim;
};

struct ValidationReport {
  std::vector<PodErrorPoint> pod;
  // Per contact operator: training, validation and converged-only curves over S.
  std::array<std::vector<double>, 3> eim_train, eim_valid, eim_valid_cv;
  std::vector<double> valid_mus;
  std::vector<HfReport> valid_hf;
  std::vector<int> rb_sizes;
  std::vector<RbRecord> rb;  // N-major over the restricted validation set
};

// Writes every curve as CSV (and SVG) into config.reports.
ValidationReport run_validate(const OfflineArtifacts& a, const RunConfig& config, const Logger& log = {});

// Convergence table study.csv over (mu, h).
StudyTable run_study(const RunConfig& config, const std::vector<double>& mus, const std::vector<double>& hs);
void write_study(const RunConfig& config, const StudyTable& t);

void ensure_directory(const std::string& path);

}  // namespace crbm
