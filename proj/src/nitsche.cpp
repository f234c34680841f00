#include "crbm/nitsche.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crbm {

double proj_ball(double x, double r) {
  if (r < 0.0) throw InvalidArgument("proj_ball: negative radius");
  if (std::abs(x) <= r) return x;
  return x > 0.0 ? r : -r;
}

double ball_proj_jacobian(double x, double s) { return std::abs(x) <= s ? 1.0 : 0.0; }

FrictionModel FrictionModel::tresca(double s) {
  if (!(s > 0.0)) throw InvalidArgument("friction: Tresca threshold must be positive");
  return {FrictionKind::Tresca, s, 0.0};
}

FrictionModel FrictionModel::coulomb(double nu_F) {
  if (!(nu_F > 0.0)) throw InvalidArgument("friction: Coulomb coefficient must be positive");
  return {FrictionKind::Coulomb, 0.0, nu_F};
}

const char* friction_name(FrictionKind kind) {
  switch (kind) {
    case FrictionKind::Frictionless:
      return "none";
    case FrictionKind::Tresca:
      return "tresca";
    case FrictionKind::Coulomb:
      return "coulomb";
  }
  return "?";
}

GapField make_gap_field(const FeSpace& space, const GapFunction& gap) {
  GapField g;
  for (const auto& ce : space.contact) {
    for (const auto& p : ce.points) g.qp.push_back(gap(p.x, p.normal));
  }
  for (const auto& cn : space.contact_nodes) g.node.push_back(gap(cn.x, cn.normal));
  return g;
}

ContactSetup make_contact_setup(const FeSpace& space, const MaterialParams& mat, const NitscheParams& nitsche,
                                const FrictionModel& friction, const GapField& gap) {
  if (!(nitsche.gamma() > 0.0)) throw InvalidArgument("nitsche: gamma must be positive");
  if (gap.qp.size() != space.num_contact_points()) throw InvalidArgument("nitsche: gap size mismatch");
  ContactSetup s;
  s.space = &space;
  s.material = mat;
  s.gamma = nitsche.gamma();
  s.friction = friction;
  s.gap = gap.qp;
  s.threshold.assign(s.gap.size(), friction.kind == FrictionKind::Tresca ? friction.threshold : 0.0);
  s.functionals.reserve(s.gap.size());
  for (const auto& ce : space.contact) {
    if (ce.points.size() > static_cast<std::size_t>(kMaxEdgePoints)) {
      throw InvalidArgument("nitsche: too many edge quadrature points");
    }
    s.offsets.push_back(static_cast<int>(s.functionals.size()));
    for (const auto& p : ce.points) {
      s.functionals.push_back(trace_functionals(space.degree, p.phi.data(), p.dphi.data(), p.normal, p.tangent, mat));
    }
  }
  return s;
}

ElementContactState contact_element_state(const ContactElement& ce, const TraceFunctionals* functionals,
                                          const double* gap, const double* threshold, double gamma,
                                          bool tangential, int n_dofs, const double* w) {
  ElementContactState st;
  st.n_dofs = n_dofs;
  st.n_points = static_cast<int>(ce.points.size());
  for (int q = 0; q < st.n_points; ++q) {
    const auto& f = functionals[q];
    const double wq = ce.points[q].weight;
    auto& p0 = st.p0[q];
    auto& pt = st.pt[q];
    double P0 = 0.0, Pt = 0.0;
    for (int a = 0; a < n_dofs; ++a) {
      p0[a] = f.snn[a] - gamma * f.vn[a];
      pt[a] = f.snt[a] - gamma * f.vt[a];
      P0 += p0[a] * w[a];
      Pt += pt[a] * w[a];
    }
    const double Pg = P0 + gamma * gap[q];
    st.b_n[q] = wq * heaviside(-Pg) / gamma;
    st.th_n[q] = wq * neg_part(Pg) / gamma;
    if (tangential) {
      const double s = threshold[q];
      st.b_t[q] = wq * ball_proj_jacobian(Pt, s) / gamma;
      st.th_t[q] = wq * proj_ball(Pt, s) / gamma;
    }
  }
  return st;
}

ElementContactState contact_element_state(const ContactSetup& setup, std::size_t element, const double* w) {
  const int off = setup.offsets[element];
  return contact_element_state(setup.space->contact[element], setup.functionals.data() + off,
                               setup.gap.data() + off, setup.threshold.data() + off, setup.gamma,
                               setup.friction.tangential(), setup.space->n_local_dofs, w);
}

double contact_tangent_entry(const ElementContactState& st, int a, int b) {
  double v = 0.0;
  for (int q = 0; q < st.n_points; ++q) {
    v += st.b_n[q] * st.p0[q][a] * st.p0[q][b] + st.b_t[q] * st.pt[q][a] * st.pt[q][b];
  }
  return v;
}

double contact_theta_n_entry(const ElementContactState& st, int a) {
  double v = 0.0;
  for (int q = 0; q < st.n_points; ++q) v += st.th_n[q] * st.p0[q][a];
  return v;
}

double contact_theta_t_entry(const ElementContactState& st, int a) {
  double v = 0.0;
  for (int q = 0; q < st.n_points; ++q) v += st.th_t[q] * st.pt[q][a];
  return v;
}

namespace {

std::array<double, kMaxLocalDofs> gather(const ContactElement& ce, int L, const Vector& w) {
  std::array<double, kMaxLocalDofs> out{};
  for (int a = 0; a < L; ++a) out[a] = w[ce.dofs[a]];
  return out;
}

}  // namespace

ContactTrace eval_contact_traces(const ContactSetup& setup, const Vector& U) {
  const auto& space = *setup.space;
  if (U.size() != space.n_dof) throw InvalidArgument("nitsche: field size mismatch");
  const int L = space.n_local_dofs;
  const double gamma = setup.gamma;
  ContactTrace tr;
  std::size_t qp = 0;
  for (const auto& ce : space.contact) {
    const auto w = gather(ce, L, U);
    for (std::size_t q = 0; q < ce.points.size(); ++q, ++qp) {
      const auto& f = setup.functionals[qp];
      double snn = 0, snt = 0, vn = 0, vt = 0;
      for (int a = 0; a < L; ++a) {
        snn += f.snn[a] * w[a];
        snt += f.snt[a] * w[a];
        vn += f.vn[a] * w[a];
        vt += f.vt[a] * w[a];
      }
      tr.sigma_nn.push_back(snn);
      tr.sigma_nt.push_back(snt);
      tr.v_n.push_back(vn);
      tr.v_t.push_back(vt);
      tr.P_n_gamma_g.push_back(snn - gamma * (vn - setup.gap[qp]));
      tr.P_n_gamma_0.push_back(snn - gamma * vn);
      tr.P_tau.push_back(snt - gamma * vt);
    }
  }
  return tr;
}

SparseOperator assemble_nitsche_correction(const FeSpace& space, const MaterialParams& mat, double gamma,
                                           bool tangential) {
  const int L = space.n_local_dofs;
  SparseOperator C(space.contact_pattern);
  for (std::size_t e = 0; e < space.contact.size(); ++e) {
    const auto& ce = space.contact[e];
    std::vector<TraceFunctionals> fs;
    for (const auto& p : ce.points) {
      fs.push_back(trace_functionals(space.degree, p.phi.data(), p.dphi.data(), p.normal, p.tangent, mat));
    }
    for (int a = 0; a < L; ++a) {
      for (int b = 0; b < L; ++b) {
        double v = 0.0;
        for (std::size_t q = 0; q < fs.size(); ++q) {
          double s = fs[q].snn[a] * fs[q].snn[b];
          if (tangential) s += fs[q].snt[a] * fs[q].snt[b];
          v += ce.points[q].weight * s / gamma;
        }
        C.values[space.contact_positions[e * L * L + a * L + b]] += v;
      }
    }
  }
  return C;
}

SparseOperator add_contact_block(const FeSpace& space, const SparseOperator& base, const SparseOperator& block) {
  SparseOperator out = base;
  for (std::size_t p = 0; p < block.values.size(); ++p) out.values[space.contact_to_global[p]] += block.values[p];
  return out;
}

SparseOperator assemble_A_gamma(const FeSpace& space, const MaterialParams& mat, const NitscheParams& nitsche,
                                const FrictionModel& friction, Exec exec) {
  SparseOperator C = assemble_nitsche_correction(space, mat, nitsche.gamma(), friction.tangential());
  for (double& v : C.values) v = -v;
  return add_contact_block(space, assemble_elasticity(space, mat, exec), C);
}

SparseOperator assemble_B_gamma(const ContactSetup& setup, const Vector& w) {
  const auto& space = *setup.space;
  const int L = space.n_local_dofs;
  SparseOperator B(space.contact_pattern);
  for (std::size_t e = 0; e < space.contact.size(); ++e) {
    const auto wl = gather(space.contact[e], L, w);
    const auto st = contact_element_state(setup, e, wl.data());
    const int* pos = space.contact_positions.data() + e * L * L;
    for (int a = 0; a < L; ++a) {
      for (int b = 0; b < L; ++b) B.values[pos[a * L + b]] += contact_tangent_entry(st, a, b);
    }
  }
  return B;
}

ThetaVectors assemble_Theta_gamma(const ContactSetup& setup, const Vector& w) {
  const auto& space = *setup.space;
  const int L = space.n_local_dofs;
  ThetaVectors th{Vector::Zero(space.n_dof), Vector::Zero(space.n_dof)};
  const bool tangential = setup.friction.tangential();
  for (std::size_t e = 0; e < space.contact.size(); ++e) {
    const auto& ce = space.contact[e];
    const auto wl = gather(ce, L, w);
    const auto st = contact_element_state(setup, e, wl.data());
    for (int a = 0; a < L; ++a) {
      th.normal[ce.dofs[a]] += contact_theta_n_entry(st, a);
      if (tangential) th.tangential[ce.dofs[a]] += contact_theta_t_entry(st, a);
    }
  }
  return th;
}

Vector residual(const NitscheProblem& problem, const Vector& w, bool zero_dirichlet) {
  const auto th = assemble_Theta_gamma(problem.contact, w);
  Vector R = problem.a_gamma * w + th.normal + th.tangential - problem.load;
  if (zero_dirichlet) {
    for (int d : problem.space->dirichlet_dofs) R[d] = 0.0;
  }
  return R;
}

SparseOperator tangent(const NitscheProblem& problem, const Vector& w) {
  return add_contact_block(*problem.space, problem.a_gamma, assemble_B_gamma(problem.contact, w));
}

Energies energy(const NitscheProblem& problem, const Vector& U) {
  const auto& setup = problem.contact;
  const auto tr = eval_contact_traces(setup, U);
  const double gamma = setup.gamma;
  Energies e;
  e.J = 0.5 * U.dot(problem.stiffness * U) - problem.load.dot(U);
  double corr_n = 0.0, pen_n = 0.0, corr_t = 0.0, pen_t = 0.0;
  std::size_t qp = 0;
  for (const auto& ce : problem.space->contact) {
    for (const auto& p : ce.points) {
      const double w = p.weight / gamma;
      corr_n += w * tr.sigma_nn[qp] * tr.sigma_nn[qp];
      const double ng = neg_part(tr.P_n_gamma_g[qp]);
      pen_n += w * ng * ng;
      if (setup.friction.tangential()) {
        const double Pt = tr.P_tau[qp];
        const double excess = Pt - proj_ball(Pt, setup.threshold[qp]);
        corr_t += w * tr.sigma_nt[qp] * tr.sigma_nt[qp];
        pen_t += w * (Pt * Pt - excess * excess);
      }
      ++qp;
    }
  }
  e.J_nitsche = e.J - 0.5 * corr_n + 0.5 * pen_n;
  e.J_friction = e.J_nitsche - 0.5 * corr_t + 0.5 * pen_t;
  return e;
}

double gram_norm(const SparseOperator& W, const Vector& v) { return std::sqrt(std::max(0.0, v.dot(W * v))); }

Vector solve_linear_elasticity(const NitscheProblem& problem) {
  const auto& space = *problem.space;
  auto sys = apply_dirichlet(problem.a_gamma, problem.load, space.dirichlet_dofs, problem.dirichlet);
  SymmetricSolver solver;
  solver.factorize(sys.matrix);
  return solver.solve(sys.rhs);
}

SolveResult solve_nitsche(const NitscheProblem& problem, const SolverConfig& config) {
  if (!(config.delta_u > 0.0) || config.max_iter < 1) throw InvalidArgument("solver: invalid configuration");
  const auto& space = *problem.space;
  Vector U = config.U0 ? *config.U0 : solve_linear_elasticity(problem);
  for (int d : space.dirichlet_dofs) U[d] = problem.dirichlet[d];

  SolveResult res;
  if (config.keep_iterates) res.iterates.push_back(U);
  SymmetricSolver solver;
  for (int k = 0; k < config.max_iter; ++k) {
    const Vector R = residual(problem, U);
    SparseOperator Kt = tangent(problem, U);
    eliminate_constrained(Kt, space.is_dirichlet);
    solver.factorize(Kt);
    const Vector dU = solver.solve(Vector(-R));
    U += dU;
    const double nu = gram_norm(problem.gram, U);
    const double nd = gram_norm(problem.gram, dU);
    const double rel = nu > 0.0 ? nd / nu : (nd > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (!std::isfinite(rel)) break;
    res.residual_history.push_back(rel);
    if (config.keep_iterates) res.iterates.push_back(U);
    if (rel <= config.delta_u) {
      res.U_cv = U;
      res.k_cv = k + 1;
      res.converged = true;
      return res;
    }
  }
  throw NonConvergence("solver: no convergence within " + std::to_string(config.max_iter) + " iterations",
                       SolveState{U, static_cast<int>(res.residual_history.size()), res.residual_history});
}

SolveResult solve_coulomb(const NitscheProblem& problem, const CoulombConfig& config) {
  if (problem.contact.friction.kind != FrictionKind::Coulomb) {
    throw InvalidArgument("coulomb: problem must carry a Coulomb friction model");
  }
  const double nu_F = problem.contact.friction.coefficient;
  const auto& space = *problem.space;

  NitscheProblem frictionless = problem;
  frictionless.contact.friction = FrictionModel::frictionless();
  {
    SparseOperator C = assemble_nitsche_correction(space, problem.contact.material, problem.contact.gamma, false);
    for (double& v : C.values) v = -v;
    frictionless.a_gamma = add_contact_block(space, problem.stiffness, C);
  }
  SolverConfig inner = config.inner;
  inner.keep_iterates = false;
  Vector U_prev = solve_nitsche(frictionless, inner).U_cv;

  // The first inner solve starts from the fully stuck state; from the
  // frictionless state every point slips and the iteration cycles.
  NitscheProblem stuck = problem;
  std::fill(stuck.contact.threshold.begin(), stuck.contact.threshold.end(), std::numeric_limits<double>::infinity());
  Vector start = solve_nitsche(stuck, inner).U_cv;

  auto threshold_from = [&](const Vector& U) {
    const auto tr = eval_contact_traces(problem.contact, U);
    std::vector<double> s(tr.P_n_gamma_g.size());
    for (std::size_t q = 0; q < s.size(); ++q) s[q] = nu_F * std::abs(neg_part(tr.P_n_gamma_g[q]));
    return s;
  };

  NitscheProblem tresca = problem;
  std::vector<double> history;
  for (int n = 1; n <= config.max_outer; ++n) {
    tresca.contact.threshold = threshold_from(U_prev);
    inner.U0 = n == 1 ? start : U_prev;
    SolveResult r = solve_nitsche(tresca, inner);
    const double nu = gram_norm(problem.gram, r.U_cv);
    const double rel = nu > 0.0 ? gram_norm(problem.gram, r.U_cv - U_prev) / nu : 0.0;
    history.push_back(rel);
    U_prev = r.U_cv;
    if (rel <= config.delta_fp) {
      r.outer_iterations = n;
      r.residual_history = history;
      r.threshold = tresca.contact.threshold;
      return r;
    }
  }
  throw NonConvergence("coulomb: fixed point did not converge within " + std::to_string(config.max_outer) +
                           " outer iterations",
                       SolveState{U_prev, static_cast<int>(history.size()), history});
}

}  // namespace crbm
