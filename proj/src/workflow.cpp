#include "crbm/workflow.hpp"

#include "crbm/csv.hpp"
#include "crbm/errors.hpp"
#include "crbm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

namespace crbm {

namespace {

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

std::string fmt_mu(double mu) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", mu);
  return buf;
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// W(mu) = mu^2 M + l^2 L on the reference pattern.
SparseOperator mapped_gram(const SparseOperator& M, const SparseOperator& L, double mu, double l) {
  SparseOperator w = M;
  for (double& v : w.values) v *= mu * mu;
  return axpy(w, l * l, L);
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

template <class T>
std::vector<std::uint32_t> to_u32(const std::vector<T>& v) {
  return {v.begin(), v.end()};
}

void put_matrices(ArtifactStore& s, const std::string& name, const std::vector<Matrix>& ms, int n) {
  Matrix all(n, n * static_cast<int>(ms.size()));
  for (std::size_t i = 0; i < ms.size(); ++i) all.middleCols(i * n, n) = ms[i];
  s.put_matrix(name, all);
}

std::vector<Matrix> get_matrices(const ArtifactStore& s, const std::string& name) {
  const Matrix all = s.get_matrix(name);
  std::vector<Matrix> out;
  const Eigen::Index n = all.rows();
  if (n == 0) return out;
  for (Eigen::Index c = 0; c < all.cols(); c += n) out.push_back(all.middleCols(c, n));
  return out;
}

void store_expansion(ArtifactStore& s, const std::string& prefix, const AffineExpansion& e, int n) {
  put_matrices(s, prefix + ".matrices", e.matrices, n);
  s.put_matrix(prefix + ".vectors", e.vectors);
}

AffineExpansion load_expansion(const ArtifactStore& s, const std::string& prefix) {
  AffineExpansion e;
  e.matrices = get_matrices(s, prefix + ".matrices");
  e.vectors = s.get_matrix(prefix + ".vectors");
  return e;
}

void store_evaluator(ArtifactStore& s, const std::string& prefix, const EntryEvaluator& ev) {
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::int32_t> contrib;
  for (const auto& entry : ev.entries) {
    for (const auto& c : entry) contrib.insert(contrib.end(), {c.element, c.a, c.b});
    offsets.push_back(static_cast<std::uint32_t>(contrib.size() / 3));
  }
  s.put_u8(prefix + ".op", {static_cast<std::uint8_t>(ev.op)});
  s.put_u32(prefix + ".offsets", offsets);
  s.put_i32(prefix + ".contributions", contrib);
}

EntryEvaluator load_evaluator(const ArtifactStore& s, const std::string& prefix) {
  EntryEvaluator ev;
  ev.op = static_cast<ContactOperator>(s.get_u8(prefix + ".op").at(0));
  const auto offsets = s.get_u32(prefix + ".offsets");
  const auto contrib = s.get_i32(prefix + ".contributions");
  if (offsets.empty() || offsets.back() * 3 != contrib.size()) throw FormatError("store: bad evaluator " + prefix);
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
    std::vector<EntryEvaluator::Contribution> entry;
    for (auto j = offsets[i]; j < offsets[i + 1]; ++j) {
      entry.push_back({contrib[3 * j], contrib[3 * j + 1], contrib[3 * j + 2]});
    }
    ev.entries.push_back(std::move(entry));
  }
  return ev;
}

void write_curve_svg(const std::string& path, const std::string& title, const std::string& x_label,
                     std::vector<PlotSeries> series) {
  PlotOptions o;
  o.title = title;
  o.x_label = x_label;
  o.y_label = "relative error";
  write_svg_plot(path, series, o);
}

std::vector<double> iota_d(std::size_t n, double start = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = start + static_cast<double>(i);
  return v;
}

}  // namespace

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw FormatError("cannot create directory '" + path + "': " + ec.message());
}

TrainingData generate_training_data(const HertzModel& model, const std::vector<double>& mus,
                                    const SolverConfig& solver, const Logger& log) {
  const auto& cfg = model.config();
  const bool tangential = cfg.friction.tangential();
  if (cfg.friction.kind == FrictionKind::Coulomb) throw NotApplicable("training: Coulomb friction has no snapshots");
  const auto P = static_cast<std::ptrdiff_t>(mus.size());
  TrainingData d;
  d.snaps.parameters = mus;
  d.snaps.friction = cfg.friction;
  d.snaps.lift = model.dirichlet();
  d.snaps.snapshots.resize(P);
  d.snaps.iterate_snapshots.resize(P);
  d.k_cv.assign(P, -1);
  d.e_ac.assign(P, nan());
  for (auto& m : d.members) m.resize(P);
  std::vector<std::string> failure(P);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t p = 0; p < P; ++p) {
    try {
      const auto inst = model.instance(mus[p], Exec::Serial);
      SolverConfig sc = solver;
      sc.keep_iterates = true;
      auto r = solve_nitsche(inst.problem, sc);
      const auto& setup = inst.problem.contact;
      for (const auto& U : r.iterates) {
        d.members[0][p].push_back(contact_member(setup, ContactOperator::Tangent, U));
        d.members[1][p].push_back(contact_member(setup, ContactOperator::ThetaNormal, U));
        if (tangential) d.members[2][p].push_back(contact_member(setup, ContactOperator::ThetaTangential, U));
      }
      d.e_ac[p] = tangential ? error_alart_curnier_tangential(*inst.space, cfg.material, setup.gamma,
                                                              cfg.friction.threshold, r.U_cv)
                             : error_alart_curnier_normal(*inst.space, cfg.material, setup.gamma, inst.gap, r.U_cv);
      d.k_cv[p] = r.k_cv;
      d.snaps.snapshots[p] = std::move(r.U_cv);
      d.snaps.iterate_snapshots[p] = std::move(r.iterates);
    } catch (const Error& e) {
      failure[p] = fmt_mu(mus[p]) + ": " + e.what();
    }
  }
  for (std::ptrdiff_t p = 0; p < P; ++p) {
    if (!failure[p].empty()) {
      d.failures.push_back(failure[p]);
      say(log, "HF solve failed at mu = " + failure[p]);
    }
  }
  return d;
}

EimFamily make_family(const FeSpace& space, ContactOperator op, const TrainingData& data, bool converged_only) {
  const auto& per_mu = data.members[static_cast<int>(op)];
  EimFamily f;
  f.kind = op == ContactOperator::Tangent ? EimKind::Matrix : EimKind::Vector;
  f.addresses = contact_addresses(space, op);
  Eigen::Index count = 0;
  for (const auto& m : per_mu) count += converged_only ? (m.empty() ? 0 : 1) : static_cast<Eigen::Index>(m.size());
  f.members.resize(static_cast<Eigen::Index>(f.addresses.size()), count);
  Eigen::Index c = 0;
  for (std::size_t p = 0; p < per_mu.size(); ++p) {
    const std::size_t k0 = converged_only && !per_mu[p].empty() ? per_mu[p].size() - 1 : 0;
    for (std::size_t k = k0; k < per_mu[p].size(); ++k) {
      f.members.col(c++) = per_mu[p][k];
      f.labels.push_back({static_cast<int>(p), static_cast<int>(k)});
    }
  }
  return f;
}

OfflineArtifacts run_offline(const RunConfig& config, const Logger& log) {
  config.validate();
  const auto friction = config.friction_model();
  if (friction.kind == FrictionKind::Coulomb) throw NotApplicable("offline: no reduced model for Coulomb friction");
  OfflineArtifacts a;
  a.config = config;
  a.model = std::make_shared<HertzModel>(config.hertz());
  const auto& model = *a.model;
  const auto& ref = model.reference_space();
  const auto mus = config.training_set();
  say(log, "offline: " + std::to_string(mus.size()) + " HF solves, " + std::to_string(ref.n_dof) + " dofs");

  auto data = generate_training_data(model, mus, config.solver, log);
  if (!data.failures.empty()) {
    std::string msg = "offline: HF solve failed for mu =";
    for (const auto& f : data.failures) msg += " [" + f + "]";
    throw NonConvergence(msg, SolveState{});
  }

  const auto W = assemble_h1_gram(ref, config.scenario.char_length);
  a.basis = pod(data.snaps, W, config.pod);
  say(log, "offline: POD rank " + std::to_string(a.basis.rank()) + ", N = " + std::to_string(a.basis.size()));

  a.b = eim_train(make_family(ref, ContactOperator::Tangent, data, false), config.eim);
  a.theta_n = eim_train(make_family(ref, ContactOperator::ThetaNormal, data, false), config.eim);
  if (friction.tangential()) {
    a.theta_t = eim_train(make_family(ref, ContactOperator::ThetaTangential, data, false), config.eim);
  }
  say(log, "offline: EIM sizes b " + std::to_string(a.b.size()) + ", theta_n " + std::to_string(a.theta_n.size()) +
               ", theta_t " + std::to_string(a.theta_t.size()));

  a.ops = reduce_hertz_operators(model, a.basis, friction.tangential());
  a.rb = reduce_expansion(a.b, ref, a.basis);
  a.rn = reduce_expansion(a.theta_n, ref, a.basis);
  a.eb = make_entry_evaluator(ref, a.b, ContactOperator::Tangent);
  a.en = make_entry_evaluator(ref, a.theta_n, ContactOperator::ThetaNormal);
  if (friction.tangential()) {
    a.rt = reduce_expansion(a.theta_t, ref, a.basis);
    a.et = make_entry_evaluator(ref, a.theta_t, ContactOperator::ThetaTangential);
  }

  a.snaps = std::move(data.snaps);
  a.snaps.iterate_snapshots.clear();
  a.k_cv = std::move(data.k_cv);
  return a;
}

void store_mesh(ArtifactStore& s, const Mesh& mesh) {
  std::vector<double> nodes;
  for (const auto& x : mesh.nodes) nodes.insert(nodes.end(), {x.x(), x.y()});
  std::vector<std::uint32_t> tris;
  for (const auto& t : mesh.triangles) tris.insert(tris.end(), t.begin(), t.end());
  // Packed records: two little-endian u32 node ids and a u8 tag.
  std::vector<std::uint8_t> edges;
  for (const auto& e : mesh.boundary_edges) {
    for (std::uint32_t n : e.nodes) {
      for (int b = 0; b < 4; ++b) edges.push_back(static_cast<std::uint8_t>(n >> (8 * b)));
    }
    edges.push_back(static_cast<std::uint8_t>(e.tag));
  }
  s.put_f64("mesh.nodes", nodes);
  s.put_u32("mesh.triangles", tris);
  s.put_u8("mesh.boundary_edges", edges);
  s.put_f64("mesh.meta", {mesh.mesh_size_h, mesh.arc_center.x(), mesh.arc_center.y(), mesh.arc_radius});
}

Mesh load_mesh(const ArtifactStore& s) {
  Mesh mesh;
  const auto nodes = s.get_f64("mesh.nodes");
  const auto tris = s.get_u32("mesh.triangles");
  const auto edges = s.get_u8("mesh.boundary_edges");
  const auto meta = s.get_f64("mesh.meta");
  if (nodes.size() % 2 || tris.size() % 3 || edges.size() % 9 || meta.size() != 4) {
    throw FormatError("store: malformed mesh sections");
  }
  for (std::size_t i = 0; i < nodes.size(); i += 2) mesh.nodes.emplace_back(nodes[i], nodes[i + 1]);
  for (std::size_t i = 0; i < tris.size(); i += 3) mesh.triangles.push_back({tris[i], tris[i + 1], tris[i + 2]});
  for (std::size_t i = 0; i < edges.size(); i += 9) {
    BoundaryEdge e{};
    for (int k = 0; k < 2; ++k) {
      std::uint32_t n = 0;
      for (int b = 0; b < 4; ++b) n |= static_cast<std::uint32_t>(edges[i + 4 * k + b]) << (8 * b);
      e.nodes[k] = n;
    }
    if (edges[i + 8] > 2) throw FormatError("store: bad boundary tag");
    e.tag = static_cast<BoundaryTag>(edges[i + 8]);
    mesh.boundary_edges.push_back(e);
  }
  mesh.mesh_size_h = meta[0];
  mesh.arc_center = Vec2(meta[1], meta[2]);
  mesh.arc_radius = meta[3];
  validate_mesh(mesh);
  return mesh;
}

void store_eim(ArtifactStore& s, const std::string& prefix, const EimDecomposition& d) {
  std::vector<std::int32_t> addr;
  for (const auto& a : d.addresses) addr.insert(addr.end(), {a[0], a[1]});
  std::vector<std::int32_t> entries;
  for (int i = 0; i < d.size(); ++i) {
    const auto e = d.entry(i);
    entries.insert(entries.end(), {e[0], e[1]});
  }
  s.put_u8(prefix + ".kind", {static_cast<std::uint8_t>(d.kind)});
  s.put_i32(prefix + ".addresses", addr);
  s.put_matrix(prefix + ".terms", d.terms);
  s.put_u32(prefix + ".indices", to_u32(d.indices));
  s.put_i32(prefix + ".entries", entries);
  s.put_matrix(prefix + ".Q", d.Q);
  s.put_f64(prefix + ".training_log", d.training_log);
  s.put_scalar(prefix + ".reference_norm", d.reference_norm);
}

EimDecomposition load_eim(const ArtifactStore& s, const std::string& prefix) {
  EimDecomposition d;
  d.kind = static_cast<EimKind>(s.get_u8(prefix + ".kind").at(0));
  const auto addr = s.get_i32(prefix + ".addresses");
  for (std::size_t i = 0; i + 1 < addr.size(); i += 2) d.addresses.push_back({addr[i], addr[i + 1]});
  d.terms = s.get_matrix(prefix + ".terms");
  const auto idx = s.get_u32(prefix + ".indices");
  d.indices.assign(idx.begin(), idx.end());
  d.Q = s.get_matrix(prefix + ".Q");
  d.training_log = s.get_f64(prefix + ".training_log");
  d.reference_norm = s.get_scalar(prefix + ".reference_norm");
  for (int i : d.indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= d.addresses.size()) throw FormatError("store: bad EIM index");
  }
  if (d.terms.cols() != d.size() || d.Q.rows() != d.size()) throw FormatError("store: inconsistent EIM " + prefix);
  return d;
}

ArtifactStore to_store(const OfflineArtifacts& a) {
  ArtifactStore s;
  s.put_bytes("config", a.config.to_text());
  store_mesh(s, a.model->reference_space().mesh);

  Matrix U(a.basis.dofs(), static_cast<Eigen::Index>(a.snaps.size()));
  for (std::size_t p = 0; p < a.snaps.size(); ++p) U.col(p) = a.snaps.snapshots[p];
  s.put_f64("snapshots.mu", a.snaps.parameters);
  s.put_matrix("snapshots.U", U);
  s.put_vector("snapshots.lift", a.snaps.lift);
  s.put_u32("snapshots.k_cv", to_u32(a.k_cv));

  s.put_matrix("basis.Z", a.basis.Z);
  s.put_vector("basis.lift", a.basis.lift);
  s.put_vector("basis.singular_values", a.basis.singular_values);
  s.put_bytes("basis.gram", a.basis.gram_used);

  const bool tangential = a.config.friction_model().tangential();
  store_eim(s, "eim.b", a.b);
  store_eim(s, "eim.theta_n", a.theta_n);
  if (tangential) store_eim(s, "eim.theta_t", a.theta_t);
  store_evaluator(s, "eval.b", a.eb);
  store_evaluator(s, "eval.theta_n", a.en);
  if (tangential) store_evaluator(s, "eval.theta_t", a.et);

  const int N = a.basis.size();
  const auto& o = a.ops;
  s.put_matrix("rom.K", o.K);
  s.put_matrix("rom.C", o.C);
  s.put_matrix("rom.M", o.M);
  s.put_matrix("rom.L", o.L);
  s.put_vector("rom.k_lift", o.k_lift);
  s.put_vector("rom.c_lift", o.c_lift);
  s.put_vector("rom.m_lift", o.m_lift);
  s.put_vector("rom.l_lift", o.l_lift);
  s.put_vector("rom.f", o.f);
  s.put_f64("rom.scalars", {o.m_ll, o.l_ll, o.char_length});
  store_expansion(s, "rom.b", a.rb, N);
  store_expansion(s, "rom.theta_n", a.rn, N);
  if (tangential) store_expansion(s, "rom.theta_t", a.rt, N);
  return s;
}

OfflineArtifacts from_store(const ArtifactStore& s) {
  OfflineArtifacts a;
  a.config = RunConfig::parse(s.get_bytes("config"));
  a.model = std::make_shared<HertzModel>(a.config.hertz(), load_mesh(s));

  a.snaps.parameters = s.get_f64("snapshots.mu");
  a.snaps.friction = a.config.friction_model();
  a.snaps.lift = s.get_vector("snapshots.lift");
  const Matrix U = s.get_matrix("snapshots.U");
  if (static_cast<std::size_t>(U.cols()) != a.snaps.parameters.size()) throw FormatError("store: snapshot count");
  for (Eigen::Index p = 0; p < U.cols(); ++p) a.snaps.snapshots.push_back(U.col(p));
  const auto k = s.get_u32("snapshots.k_cv");
  a.k_cv.assign(k.begin(), k.end());

  a.basis.Z = s.get_matrix("basis.Z");
  a.basis.lift = s.get_vector("basis.lift");
  a.basis.singular_values = s.get_vector("basis.singular_values");
  a.basis.gram_used = s.get_bytes("basis.gram");
  if (a.basis.dofs() != a.model->reference_space().n_dof) throw FormatError("store: basis does not match the mesh");

  const bool tangential = a.config.friction_model().tangential();
  a.b = load_eim(s, "eim.b");
  a.theta_n = load_eim(s, "eim.theta_n");
  a.eb = load_evaluator(s, "eval.b");
  a.en = load_evaluator(s, "eval.theta_n");
  if (tangential) {
    a.theta_t = load_eim(s, "eim.theta_t");
    a.et = load_evaluator(s, "eval.theta_t");
  }

  auto& o = a.ops;
  o.K = s.get_matrix("rom.K");
  o.C = s.get_matrix("rom.C");
  o.M = s.get_matrix("rom.M");
  o.L = s.get_matrix("rom.L");
  o.k_lift = s.get_vector("rom.k_lift");
  o.c_lift = s.get_vector("rom.c_lift");
  o.m_lift = s.get_vector("rom.m_lift");
  o.l_lift = s.get_vector("rom.l_lift");
  o.f = s.get_vector("rom.f");
  const auto sc = s.get_f64("rom.scalars");
  if (sc.size() != 3) throw FormatError("store: rom.scalars");
  o.m_ll = sc[0];
  o.l_ll = sc[1];
  o.char_length = sc[2];
  a.rb = load_expansion(s, "rom.b");
  a.rn = load_expansion(s, "rom.theta_n");
  if (tangential) a.rt = load_expansion(s, "rom.theta_t");
  return a;
}

OnlineModel make_online_model(const OfflineArtifacts& a) {
  OnlineParts p{a.ops, a.rb, a.rn, a.rt, a.eb, a.en, a.et};
  return make_online_model(*a.model, a.config.friction_model(), a.basis, a.b, a.theta_n, a.theta_t, std::move(p));
}

HfReport run_hf_solve(const RunConfig& config, double mu) {
  config.validate();
  const HertzModel model(config.hertz());
  const auto& cfg = model.config();
  const auto inst = model.instance(mu);
  HfReport r;
  r.mu = mu;
  r.friction = friction_name(cfg.friction.kind);
  r.n_dof = inst.space->n_dof;
  SolverConfig sc = config.solver;
  sc.keep_iterates = false;
  SolveResult res;
  if (cfg.friction.kind == FrictionKind::Coulomb) {
    CoulombConfig cc = config.coulomb;
    cc.inner = sc;
    res = solve_coulomb(inst.problem, cc);
  } else {
    res = solve_nitsche(inst.problem, sc);
  }
  r.k_cv = res.k_cv;
  r.outer_iterations = res.outer_iterations;
  r.converged = res.converged;
  const double gamma = inst.problem.contact.gamma;
  r.e_ac_n = error_alart_curnier_normal(*inst.space, cfg.material, gamma, inst.gap, res.U_cv);
  switch (cfg.friction.kind) {
    case FrictionKind::Frictionless:
      r.e_ac_nt = nan();
      break;
    case FrictionKind::Tresca:
      r.e_ac_nt = error_alart_curnier_tangential(*inst.space, cfg.material, gamma, cfg.friction.threshold, res.U_cv);
      break;
    case FrictionKind::Coulomb: {
      const auto s = coulomb_node_threshold(*inst.space, cfg.material, gamma, inst.gap, cfg.friction.coefficient,
                                            res.U_cv);
      r.e_ac_nt = error_alart_curnier_tangential(*inst.space, cfg.material, gamma, s, res.U_cv);
      break;
    }
  }
  r.energy = energy(inst.problem, res.U_cv);
  r.trace = boundary_stress_trace(*inst.space, cfg.material, res.U_cv);
  for (const auto& cn : inst.space->contact_nodes) r.contact_x.push_back(cn.x);
  r.U = std::move(res.U_cv);
  return r;
}

void write_hf_outputs(const RunConfig& config, const HfReport& r) {
  ensure_directory(config.reports);
  CsvWriter summary(path_in(config.reports, "hf_solve.csv"), "hf_solve",
                    {"mu", "friction", "n_dof", "k_cv", "outer_iterations", "converged", "e_ac_n", "e_ac_nt", "J",
                     "J_nitsche", "J_friction"});
  summary.row({r.mu, r.friction, static_cast<long long>(r.n_dof), static_cast<long long>(r.k_cv),
               static_cast<long long>(r.outer_iterations), static_cast<long long>(r.converged), r.e_ac_n, r.e_ac_nt,
               r.energy.J, r.energy.J_nitsche, r.energy.J_friction});
  CsvWriter trace(path_in(config.reports, "hf_trace.csv"), "hf_trace",
                  {"x", "y", "sigma_nn", "sigma_nt", "u_n", "u_t"});
  for (std::size_t i = 0; i < r.contact_x.size(); ++i) {
    trace.row({r.contact_x[i].x(), r.contact_x[i].y(), r.trace.node_sigma_nn[i], r.trace.node_sigma_nt[i],
               r.trace.node_u_n[i], r.trace.node_u_t[i]});
  }
  ArtifactStore s;
  s.put_scalar("mu", r.mu);
  s.put_vector("U", r.U);
  s.write(path_in(config.reports, "hf_solution.bin"));
}

OnlineReport run_online(const OfflineArtifacts& a, const OnlineModel& m, double mu, int N) {
  SolverConfig sc;
  sc.delta_u = a.config.solver.delta_u;
  sc.max_iter = a.config.online_max_iter;
  OnlineReport r;
  r.mu = mu;
  r.N = N;
  r.solution = solve_reduced_eim(m, mu, N, sc);
  for (std::size_t p = 0; p < a.snaps.size(); ++p) {
    if (std::abs(a.snaps.parameters[p] - mu) <= 1e-12 * std::max(1.0, mu)) {
      const auto W = mapped_gram(a.model->reference_mass(), a.model->reference_laplacian(), mu,
                                 a.config.scenario.char_length);
      const Vector& hf = a.snaps.snapshots[p];
      r.e_snapshot = gram_norm(W, hf - r.solution.U) / gram_norm(W, hf);
      break;
    }
  }
  return r;
}

void write_online_outputs(const RunConfig& config, const OnlineReport& r) {
  ensure_directory(config.reports);
  const auto& s = r.solution;
  CsvWriter summary(path_in(config.reports, "online.csv"), "online",
                    {"mu", "N", "k_cv", "converged", "t_coefficients", "t_reduced_solve", "t_reconstruction",
                     "element_visits", "e_snapshot"});
  summary.row({r.mu, static_cast<long long>(r.N), static_cast<long long>(s.k_cv), static_cast<long long>(s.converged),
               s.timings.coefficients, s.timings.reduced_solve, s.timings.reconstruction,
               static_cast<long long>(s.element_visits), r.e_snapshot});
  CsvWriter coeffs(path_in(config.reports, "online_coeffs.csv"), "online_coeffs", {"n", "coefficient"});
  for (Eigen::Index i = 0; i < s.coeffs.size(); ++i) coeffs.row({static_cast<long long>(i + 1), s.coeffs[i]});
  ArtifactStore out;
  out.put_scalar("mu", r.mu);
  out.put_vector("coefficients", s.coeffs);
  out.put_vector("U", s.U);
  out.write(path_in(config.reports, "online_solution.bin"));
}

ValidationReport run_validate(const OfflineArtifacts& a, const RunConfig& config, const Logger& log) {
  ensure_directory(config.reports);
  const HertzModel& model = *a.model;
  const auto& cfg = model.config();
  const auto& ref = model.reference_space();
  const bool tangential = cfg.friction.tangential();
  const double l = a.config.scenario.char_length;
  const auto M = model.reference_mass();
  const auto L = model.reference_laplacian();
  ValidationReport rep;

  // POD projection error over the training snapshots.
  {
    std::vector<SparseOperator> grams;
    for (double mu : a.snaps.parameters) grams.push_back(mapped_gram(M, L, mu, l));
    rep.pod = pod_projection_error(a.snaps, a.basis, grams);
    CsvWriter w(path_in(config.reports, "pod.csv"), "pod_error", {"N", "e_pod", "singular_value"});
    std::vector<double> x, y;
    for (const auto& p : rep.pod) {
      w.row({static_cast<long long>(p.N), p.e_pod, a.basis.singular_values[p.N - 1]});
      x.push_back(p.N);
      y.push_back(p.e_pod);
    }
    write_curve_svg(path_in(config.reports, "pod.svg"), "POD projection error", "N", {{"e_POD", x, y}});
  }

  // HF solves on the validation set.
  rep.valid_mus = a.config.validation_set();
  say(log, "validate: " + std::to_string(rep.valid_mus.size()) + " HF solves on the validation set");
  auto data = generate_training_data(model, rep.valid_mus, a.config.solver, log);
  {
    CsvWriter w(path_in(config.reports, "hf_valid.csv"), "hf_valid", {"mu", "converged", "k_cv", "e_ac"});
    for (std::size_t p = 0; p < rep.valid_mus.size(); ++p) {
      HfReport h;
      h.mu = rep.valid_mus[p];
      h.friction = friction_name(cfg.friction.kind);
      h.converged = data.k_cv[p] >= 0;
      h.k_cv = data.k_cv[p];
      h.e_ac_n = data.e_ac[p];
      if (h.converged) h.U = data.snaps.snapshots[p];
      w.row({h.mu, static_cast<long long>(h.converged), static_cast<long long>(h.k_cv), h.e_ac_n});
      rep.valid_hf.push_back(std::move(h));
    }
  }

  // EIM curves: training log, validation over all iterates and over
  // converged states alone.
  const EimDecomposition* decomps[3] = {&a.b, &a.theta_n, &a.theta_t};
  for (int op = 0; op < (tangential ? 3 : 2); ++op) {
    const auto cop = static_cast<ContactOperator>(op);
    const auto& d = *decomps[op];
    rep.eim_train[op] = d.training_log;
    rep.eim_valid[op] = eim_error_curve(d, make_family(ref, cop, data, false).members);
    rep.eim_valid_cv[op] = eim_error_curve(d, make_family(ref, cop, data, true).members);
    const std::string name = contact_operator_name(cop);
    CsvWriter w(path_in(config.reports, "eim_" + name + ".csv"), "eim_error",
                {"S", "e_train", "e_valid", "e_valid_converged"});
    for (std::size_t s = 0; s < rep.eim_train[op].size(); ++s) {
      w.row({static_cast<long long>(s), rep.eim_train[op][s], rep.eim_valid[op][s], rep.eim_valid_cv[op][s]});
    }
    const auto x = iota_d(rep.eim_train[op].size());
    write_curve_svg(path_in(config.reports, "eim_" + name + ".svg"), "EIM error, " + name, "S",
                    {{"training", x, rep.eim_train[op]},
                     {"validation", x, rep.eim_valid[op]},
                     {"validation, converged", x, rep.eim_valid_cv[op]}});
  }

  // RB errors on the restricted validation set.
  std::vector<std::size_t> pick;
  for (std::size_t p = 0; p < rep.valid_mus.size(); ++p) {
    if (rep.valid_mus[p] <= config.valid_restrict && rep.valid_hf[p].converged) pick.push_back(p);
  }
  const int Nmax = a.basis.size();
  for (int N = config.rb_min_N; N <= Nmax; N += config.rb_step) rep.rb_sizes.push_back(N);
  if (rep.rb_sizes.empty() || rep.rb_sizes.back() != Nmax) rep.rb_sizes.push_back(Nmax);
  say(log, "validate: RB sweep over " + std::to_string(rep.rb_sizes.size()) + " sizes and " +
               std::to_string(pick.size()) + " parameters");

  const OnlineModel om = make_online_model(a);
  SolverConfig sc;
  sc.delta_u = a.config.solver.delta_u;
  sc.max_iter = a.config.online_max_iter;
  sc.keep_iterates = false;
  const std::size_t nN = rep.rb_sizes.size();
  rep.rb.resize(nN * pick.size());
  const auto nP = static_cast<std::ptrdiff_t>(pick.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < nP; ++i) {
    const double mu = rep.valid_mus[pick[i]];
    const Vector& hf = rep.valid_hf[pick[i]].U;
    const auto inst = model.instance(mu, Exec::Serial);
    for (std::size_t j = 0; j < nN; ++j) {
      RbRecord& rec = rep.rb[j * pick.size() + i];
      rec.N = rep.rb_sizes[j];
      rec.mu = mu;
      try {
        const auto r = solve_reduced_naive(a.basis.truncated(rec.N), inst.problem, sc);
        rec.naive = rb_error_metrics(*inst.space, cfg.material, inst.problem.gram, hf, r.U);
        rec.naive_ok = true;
      } catch (const Error&) {
      }
      try {
        const auto r = solve_reduced_eim(om, mu, rec.N, sc);
        rec.eim = rb_error_metrics(*inst.space, cfg.material, inst.problem.gram, hf, r.U);
        rec.eim_ok = true;
      } catch (const Error&) {
      }
    }
  }

  {
    CsvWriter detail(path_in(config.reports, "rb_detail.csv"), "rb_detail",
                     {"N", "mu", "naive_ok", "eim_ok", "e_u_naive", "e_u_eim", "e_nn_naive", "e_nn_eim", "e_nt_naive",
                      "e_nt_eim"});
    for (const auto& r : rep.rb) {
      const double x = nan();
      detail.row({static_cast<long long>(r.N), r.mu, static_cast<long long>(r.naive_ok),
                  static_cast<long long>(r.eim_ok), r.naive_ok ? r.naive.e_u : x, r.eim_ok ? r.eim.e_u : x,
                  r.naive_ok ? r.naive.e_nn : x, r.eim_ok ? r.eim.e_nn : x, r.naive_ok ? r.naive.e_nt : x,
                  r.eim_ok ? r.eim.e_nt : x});
    }
    CsvWriter w(path_in(config.reports, "rb.csv"), "rb_error",
                {"N", "e_u_naive", "e_u_eim", "e_nn_naive", "e_nn_eim", "e_nt_naive", "e_nt_eim", "fail_naive",
                 "fail_eim"});
    std::vector<double> xs;
    std::array<std::vector<double>, 6> ys;
    for (std::size_t j = 0; j < nN; ++j) {
      std::array<double, 6> mx{};
      long long fn = 0, fe = 0;
      for (std::size_t i = 0; i < pick.size(); ++i) {
        const auto& r = rep.rb[j * pick.size() + i];
        if (r.naive_ok) {
          mx[0] = std::max(mx[0], r.naive.e_u);
          mx[2] = std::max(mx[2], r.naive.e_nn);
          mx[4] = std::max(mx[4], r.naive.e_nt);
        } else {
          ++fn;
        }
        if (r.eim_ok) {
          mx[1] = std::max(mx[1], r.eim.e_u);
          mx[3] = std::max(mx[3], r.eim.e_nn);
          mx[5] = std::max(mx[5], r.eim.e_nt);
        } else {
          ++fe;
        }
      }
      w.row({static_cast<long long>(rep.rb_sizes[j]), mx[0], mx[1], mx[2], mx[3], mx[4], mx[5], fn, fe});
      xs.push_back(rep.rb_sizes[j]);
      for (int k = 0; k < 6; ++k) ys[k].push_back(mx[k]);
    }
    std::vector<PlotSeries> series{{"e_u naive", xs, ys[0]},
                                   {"e_u EIM", xs, ys[1]},
                                   {"e_nn naive", xs, ys[2]},
                                   {"e_nn EIM", xs, ys[3]}};
    if (tangential) {
      series.push_back({"e_nt naive", xs, ys[4]});
      series.push_back({"e_nt EIM", xs, ys[5]});
    }
    write_curve_svg(path_in(config.reports, "rb.svg"), "RB error on the validation set", "N", std::move(series));
  }
  return rep;
}

StudyTable run_study(const RunConfig& config, const std::vector<double>& mus, const std::vector<double>& hs) {
  config.validate();
  return convergence_study(config.hertz(), mus, hs);
}

void write_study(const RunConfig& config, const StudyTable& t) {
  ensure_directory(config.reports);
  CsvWriter w(path_in(config.reports, "study.csv"), "study",
              {"mu", "h", "n_dof", "k_cv", "converged", "e_ac", "order"});
  const std::size_t nh = t.hs.size();
  for (std::size_t i = 0; i < t.mus.size(); ++i) {
    for (std::size_t j = 0; j < nh; ++j) {
      const auto& c = t.cells[i * nh + j];
      const double order = j > 0 && !t.orders.empty() ? t.orders[i][j - 1] : nan();
      w.row({c.mu, c.h, static_cast<long long>(c.n_dof), static_cast<long long>(c.k_cv),
             static_cast<long long>(c.converged), c.e_ac, order});
    }
  }
}

}  // namespace crbm
