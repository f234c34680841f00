#include "crbm/hertz.hpp"

#include "crbm/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace crbm {

void HertzConfig::validate() const {
  if (!(d >= g0)) throw ConfigError("hertz: need d >= g0");
  if (!(mu_min > 0.0 && mu_max >= mu_min)) throw ConfigError("hertz: invalid mu range");
  if (!(R2 > 0.0) || !(g0 >= 0.0)) throw ConfigError("hertz: invalid obstacle");
  if (!(gamma0_factor > 0.0)) throw ConfigError("hertz: gamma0_factor must be positive");
  if (!(h_target > 0.0)) throw ConfigError("hertz: h must be positive");
  if (degree != 1 && degree != 2) throw ConfigError("hertz: degree must be 1 or 2");
  if (!(char_length >= 0.0)) throw ConfigError("hertz: characteristic length must be nonnegative");
}

double RigidDiskGap::operator()(const Vec2& x, const Vec2& n) const {
  const Vec2 c(0.0, -(mu + g0 + R2));
  const Vec2 r = x - c;
  const double b = n.dot(r);
  const double cc = r.squaredNorm() - R2 * R2;
  const double disc = b * b - cc;
  if (disc < 0.0) return kNoIntersection;
  const double root = std::sqrt(disc);
  if (-b + root < 0.0) return kNoIntersection;
  return -b - root;
}

HertzModel::HertzModel(HertzConfig cfg)
    : HertzModel(cfg, build_reference_halfdisk(cfg.h_target, cfg.contact_arc, cfg.grading)) {}

HertzModel::HertzModel(HertzConfig cfg, const Mesh& reference_mesh) : cfg_(std::move(cfg)) {
  cfg_.validate();
  reference_ = std::make_shared<FeSpace>(build_fe_space(reference_mesh, cfg_.degree));
}

Vector HertzModel::dirichlet() const {
  const double d = cfg_.d;
  return dirichlet_values(*reference_, [d](const Vec2&) { return Vec2(0.0, -d); });
}

HertzInstance HertzModel::instance(double mu, const FrictionModel& friction, Exec exec) const {
  if (!(mu > 0.0)) throw InvalidArgument("hertz: mu must be positive");
  HertzInstance inst;
  inst.mu = mu;
  inst.space = std::make_unique<FeSpace>(map_fe_space(*reference_, mapping(mu)));
  const FeSpace& s = *inst.space;
  inst.gap = make_gap_field(s, gap(mu));
  auto& p = inst.problem;
  p.space = &s;
  p.contact = make_contact_setup(s, cfg_.material, cfg_.nitsche(), friction, inst.gap);
  p.stiffness = assemble_elasticity(s, cfg_.material, exec);
  SparseOperator C = assemble_nitsche_correction(s, cfg_.material, p.contact.gamma, friction.tangential());
  for (double& v : C.values) v = -v;
  p.a_gamma = add_contact_block(s, p.stiffness, C);
  p.gram = assemble_h1_gram(s, cfg_.char_length, exec);
  p.load = Vector::Zero(s.n_dof);
  p.dirichlet = dirichlet();
  return inst;
}

SparseOperator HertzModel::reference_stiffness() const { return assemble_elasticity(*reference_, cfg_.material); }

SparseOperator HertzModel::reference_correction(bool tangential) const {
  const SparseOperator C =
      assemble_nitsche_correction(*reference_, cfg_.material, cfg_.nitsche().gamma(), tangential);
  return add_contact_block(*reference_, SparseOperator(reference_->pattern), C);
}

SparseOperator HertzModel::reference_mass() const { return assemble_mass(*reference_); }

SparseOperator HertzModel::reference_laplacian() const { return assemble_vector_laplacian(*reference_); }

double error_alart_curnier_normal(const FeSpace& space, const MaterialParams& mat, double gamma,
                                  const GapField& gap, const Vector& U) {
  const auto tr = boundary_stress_trace(space, mat, U);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < tr.node_sigma_nn.size(); ++i) {
    const double s = tr.node_sigma_nn[i];
    const double P = s - gamma * (tr.node_u_n[i] - gap.node[i]);
    num += (s - neg_part(P)) * (s - neg_part(P));
    den += s * s;
  }
  if (den == 0.0) throw NotApplicable("e_AC: sigma_nn vanishes on the contact boundary");
  return std::sqrt(num / den);
}

double error_alart_curnier_tangential(const FeSpace& space, const MaterialParams& mat, double gamma,
                                      const std::vector<double>& node_threshold, const Vector& U) {
  const auto tr = boundary_stress_trace(space, mat, U);
  if (node_threshold.size() != tr.node_sigma_nt.size()) throw InvalidArgument("e_AC: threshold size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < tr.node_sigma_nt.size(); ++i) {
    const double st = tr.node_sigma_nt[i];
    const double P = st - gamma * tr.node_u_t[i];
    const double diff = st - proj_ball(P, node_threshold[i]);
    num += diff * diff;
    den += tr.node_sigma_nn[i] * tr.node_sigma_nn[i];
  }
  if (den == 0.0) throw NotApplicable("e_AC: sigma_nn vanishes on the contact boundary");
  return std::sqrt(num / den);
}

double error_alart_curnier_tangential(const FeSpace& space, const MaterialParams& mat, double gamma, double s,
                                      const Vector& U) {
  return error_alart_curnier_tangential(space, mat, gamma, std::vector<double>(space.contact_nodes.size(), s), U);
}

std::vector<double> coulomb_node_threshold(const FeSpace& space, const MaterialParams& mat, double gamma,
                                           const GapField& gap, double nu_F, const Vector& U) {
  const auto tr = boundary_stress_trace(space, mat, U);
  std::vector<double> s(tr.node_sigma_nn.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = nu_F * std::abs(neg_part(tr.node_sigma_nn[i] - gamma * (tr.node_u_n[i] - gap.node[i])));
  }
  return s;
}

RbErrors rb_error_metrics(const FeSpace& space, const MaterialParams& mat, const SparseOperator& gram,
                          const Vector& hf, const Vector& rb) {
  RbErrors e;
  const double nh = gram_norm(gram, hf);
  e.e_u = nh > 0.0 ? gram_norm(gram, hf - rb) / nh : 0.0;
  const auto th = boundary_stress_trace(space, mat, hf);
  const auto tr = boundary_stress_trace(space, mat, rb);
  double nn = 0, dn = 0, nt = 0, dt = 0;
  for (std::size_t i = 0; i < th.node_sigma_nn.size(); ++i) {
    const double a = th.node_sigma_nn[i] - tr.node_sigma_nn[i];
    const double b = th.node_sigma_nt[i] - tr.node_sigma_nt[i];
    nn += a * a;
    nt += b * b;
    dn += th.node_sigma_nn[i] * th.node_sigma_nn[i];
    dt += th.node_sigma_nt[i] * th.node_sigma_nt[i];
  }
  e.e_nn = dn > 0.0 ? std::sqrt(nn / dn) : 0.0;
  e.e_nt = dt > 0.0 ? std::sqrt(nt / dt) : 0.0;
  return e;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::istringstream in(spec);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c)) {
    throw ConfigError("grid: expected start:step:count, got '" + spec + "'");
  }
  double start = 0.0, step = 0.0;
  long count = 0;
  try {
    start = std::stod(a);
    step = std::stod(b);
    count = std::stol(c);
  } catch (const std::exception&) {
    throw ConfigError("grid: malformed '" + spec + "'");
  }
  if (count < 1) throw ConfigError("grid: count must be positive");
  std::vector<double> out(count);
  for (long i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
  return out;
}

std::vector<double> uniform_draws(double lo, double hi, int count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> out(count);
  for (auto& v : out) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v = lo + (hi - lo) * u;
  }
  return out;
}

StudyTable convergence_study(const HertzConfig& cfg, const std::vector<double>& mus, const std::vector<double>& hs) {
  if (mus.empty() || hs.empty()) throw InvalidArgument("study: empty parameter or mesh list");
  StudyTable table;
  table.mus = mus;
  table.hs = hs;
  table.cells.resize(mus.size() * hs.size());
  for (std::size_t j = 0; j < hs.size(); ++j) {
    HertzConfig c = cfg;
    c.h_target = hs[j];
    const HertzModel model(c);
    const auto n_mu = static_cast<std::ptrdiff_t>(mus.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n_mu; ++i) {
      StudyCell& cell = table.cells[i * hs.size() + j];
      cell.mu = mus[i];
      cell.h = hs[j];
      try {
        const auto inst = model.instance(mus[i], Exec::Serial);
        cell.n_dof = inst.space->n_dof;
        SolverConfig sc;
        sc.keep_iterates = false;
        const auto r = solve_nitsche(inst.problem, sc);
        cell.k_cv = r.k_cv;
        cell.converged = true;
        const double gamma = inst.problem.contact.gamma;
        cell.e_ac = c.friction.kind == FrictionKind::Tresca
                        ? error_alart_curnier_tangential(*inst.space, c.material, gamma, c.friction.threshold, r.U_cv)
                        : error_alart_curnier_normal(*inst.space, c.material, gamma, inst.gap, r.U_cv);
      } catch (const Error&) {
        cell.converged = false;
      }
    }
  }
  if (hs.size() > 1) {
    for (std::size_t i = 0; i < mus.size(); ++i) {
      std::vector<double> ord;
      for (std::size_t j = 0; j + 1 < hs.size(); ++j) {
        const auto& a = table.cells[i * hs.size() + j];
        const auto& b = table.cells[i * hs.size() + j + 1];
        ord.push_back(std::log(a.e_ac / b.e_ac) / std::log(hs[j] / hs[j + 1]));
      }
      table.orders.push_back(ord);
    }
  }
  return table;
}

}  // namespace crbm
