#include "crbm/eim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace crbm {

void EimConfig::validate() const {
  if (!(delta > 0.0)) throw InvalidArgument("eim: delta must be positive");
  if (max_terms < 1) throw InvalidArgument("eim: max_terms must be positive");
}

namespace {

// Column sup-norms; ties resolved to the first index.
void column_max(const Matrix& R, Eigen::Index& col, double& value) {
  col = 0;
  value = -1.0;
  for (Eigen::Index j = 0; j < R.cols(); ++j) {
    const double v = R.col(j).cwiseAbs().maxCoeff();
    if (v > value) {
      value = v;
      col = j;
    }
  }
}

Eigen::Index first_argmax_abs(const Eigen::Ref<const Vector>& v) {
  Eigen::Index best = 0;
  double value = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > value) {
      value = std::abs(v[i]);
      best = i;
    }
  }
  return best;
}

double family_norm(const Matrix& members) {
  return members.size() ? members.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

EimDecomposition eim_train(const EimFamily& family, const EimConfig& config) {
  config.validate();
  if (family.members.cols() == 0 || family.members.rows() == 0) throw InvalidArgument("eim: empty family");
  if (static_cast<std::size_t>(family.members.rows()) != family.addresses.size()) {
    throw InvalidArgument("eim: address count mismatch");
  }
  EimDecomposition d;
  d.kind = family.kind;
  d.addresses = family.addresses;
  d.reference_norm = family_norm(family.members);
  if (!(d.reference_norm > 0.0)) throw DegenerateFamily("eim: family is identically zero");

  Matrix R = family.members;
  std::vector<Vector> terms;
  Eigen::Index m = 0;
  double rmax = 0.0;
  column_max(R, m, rmax);
  d.training_log.push_back(rmax / d.reference_norm);
  while (d.size() < config.max_terms && rmax > config.delta * d.reference_norm) {
    const Eigen::Index i = first_argmax_abs(R.col(m));
    const double pivot = R(i, m);
    if (pivot == 0.0) break;
    Vector xi = R.col(m) / pivot;
    xi[i] = 1.0;
    const Eigen::RowVectorXd coef = R.row(i);
    R.noalias() -= xi * coef;
    R.row(i).setZero();
    terms.push_back(std::move(xi));
    d.indices.push_back(static_cast<int>(i));
    column_max(R, m, rmax);
    d.training_log.push_back(rmax / d.reference_norm);
  }

  const int S = d.size();
  d.terms.resize(family.members.rows(), S);
  for (int s = 0; s < S; ++s) d.terms.col(s) = terms[s];
  d.Q.resize(S, S);
  for (int r = 0; r < S; ++r) {
    for (int c = 0; c < S; ++c) d.Q(r, c) = d.terms(d.indices[r], c);
  }
  return d;
}

Vector eim_online_coeffs(const EimDecomposition& d, const Vector& T) {
  const int n = static_cast<int>(T.size());
  if (n > d.size()) throw InvalidArgument("eim: more values than terms");
  Vector alpha(n);
  for (int i = 0; i < n; ++i) {
    double v = T[i];
    for (int j = 0; j < i; ++j) v -= d.Q(i, j) * alpha[j];
    alpha[i] = v;
  }
  return alpha;
}

Vector eim_interpolate(const EimDecomposition& d, const Vector& T) {
  const Vector alpha = eim_online_coeffs(d, T);
  return d.terms.leftCols(alpha.size()) * alpha;
}

std::vector<double> eim_error_curve(const EimDecomposition& d, const Matrix& members) {
  if (members.rows() != d.terms.rows()) throw InvalidArgument("eim: member length mismatch");
  std::vector<double> out;
  const double ref = family_norm(members);
  if (members.cols() == 0 || ref == 0.0) return std::vector<double>(d.size() + 1, 0.0);
  Matrix R = members;
  out.push_back(R.cwiseAbs().maxCoeff() / ref);
  for (int s = 0; s < d.size(); ++s) {
    const Eigen::RowVectorXd coef = R.row(d.indices[s]);
    R.noalias() -= d.terms.col(s) * coef;
    out.push_back(R.cwiseAbs().maxCoeff() / ref);
  }
  return out;
}

const char* contact_operator_name(ContactOperator op) {
  switch (op) {
    case ContactOperator::Tangent:
      return "b";
    case ContactOperator::ThetaNormal:
      return "theta_n";
    case ContactOperator::ThetaTangential:
      return "theta_t";
  }
  return "?";
}

std::vector<EntryAddress> contact_addresses(const FeSpace& space, ContactOperator op) {
  std::vector<EntryAddress> out;
  if (op == ContactOperator::Tangent) {
    const auto& p = *space.contact_pattern;
    for (int i = 0; i < p.rows(); ++i) {
      for (int k = p.indptr()[i]; k < p.indptr()[i + 1]; ++k) out.push_back({i, p.indices()[k]});
    }
  } else {
    for (int dof : space.contact_support) out.push_back({dof, -1});
  }
  return out;
}

Vector contact_member(const ContactSetup& setup, ContactOperator op, const Vector& w) {
  if (op == ContactOperator::Tangent) {
    const auto B = assemble_B_gamma(setup, w);
    return Eigen::Map<const Vector>(B.values.data(), static_cast<Eigen::Index>(B.values.size()));
  }
  const auto th = assemble_Theta_gamma(setup, w);
  const Vector& full = op == ContactOperator::ThetaNormal ? th.normal : th.tangential;
  const auto& support = setup.space->contact_support;
  Vector out(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) out[i] = full[support[i]];
  return out;
}

LocalContact make_local_contact(const FeSpace& reference, std::vector<int> elements, const GeometricMapping& map,
                                const MaterialParams& mat, double gamma, const FrictionModel& friction,
                                const GapFunction& gap) {
  LocalContact lc;
  lc.elements = std::move(elements);
  lc.gamma = gamma;
  lc.tangential = friction.tangential();
  lc.n_local_dofs = reference.n_local_dofs;
  const double s = friction.kind == FrictionKind::Tresca ? friction.threshold : 0.0;
  for (int e : lc.elements) {
    ContactElement ce = map_contact_element(reference, e, map);
    std::vector<TraceFunctionals> fs;
    std::vector<double> g;
    for (const auto& p : ce.points) {
      fs.push_back(trace_functionals(reference.degree, p.phi.data(), p.dphi.data(), p.normal, p.tangent, mat));
      g.push_back(gap(p.x, p.normal));
    }
    lc.threshold.emplace_back(ce.points.size(), s);
    lc.functionals.push_back(std::move(fs));
    lc.gap.push_back(std::move(g));
    lc.mapped.push_back(std::move(ce));
  }
  return lc;
}

std::vector<ElementContactState> local_states(const LocalContact& local, const std::vector<LocalField>& w) {
  if (w.size() != local.elements.size()) throw InvalidArgument("eim: local field count mismatch");
  std::vector<ElementContactState> out;
  out.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    out.push_back(contact_element_state(local.mapped[i], local.functionals[i].data(), local.gap[i].data(),
                                        local.threshold[i].data(), local.gamma, local.tangential,
                                        local.n_local_dofs, w[i].data()));
  }
  return out;
}

std::vector<LocalField> gather_local(const FeSpace& space, const std::vector<int>& elements, const Vector& w) {
  std::vector<LocalField> out(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& ce = space.contact[elements[i]];
    out[i].fill(0.0);
    for (int a = 0; a < space.n_local_dofs; ++a) out[i][a] = w[ce.dofs[a]];
  }
  return out;
}

std::vector<int> EntryEvaluator::elements() const {
  std::vector<int> out;
  for (const auto& e : entries) {
    for (const auto& c : e) out.push_back(c.element);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t EntryEvaluator::visits() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.size();
  return n;
}

std::size_t EntryEvaluator::max_elements_per_entry() const {
  std::size_t n = 0;
  for (const auto& e : entries) n = std::max(n, e.size());
  return n;
}

EntryEvaluator make_entry_evaluator(const FeSpace& space, const EimDecomposition& d, ContactOperator op) {
  const bool matrix = op == ContactOperator::Tangent;
  if (matrix != (d.kind == EimKind::Matrix)) throw InvalidArgument("eim: operator kind mismatch");
  // (element, local index) occurrences of each dof, ascending in element.
  std::vector<std::vector<std::array<int, 2>>> where(space.n_dof);
  for (std::size_t e = 0; e < space.contact.size(); ++e) {
    for (int a = 0; a < space.n_local_dofs; ++a) where[space.contact[e].dofs[a]].push_back({static_cast<int>(e), a});
  }
  EntryEvaluator ev;
  ev.op = op;
  for (int s = 0; s < d.size(); ++s) {
    const auto [i, j] = d.entry(s);
    std::vector<EntryEvaluator::Contribution> list;
    if (!matrix) {
      for (const auto& [e, a] : where[i]) list.push_back({e, a, -1});
    } else {
      const auto& wi = where[i];
      const auto& wj = where[j];
      std::size_t p = 0, q = 0;
      while (p < wi.size() && q < wj.size()) {
        if (wi[p][0] < wj[q][0]) {
          ++p;
        } else if (wi[p][0] > wj[q][0]) {
          ++q;
        } else {
          list.push_back({wi[p][0], wi[p][1], wj[q][1]});
          ++p;
          ++q;
        }
      }
    }
    ev.entries.push_back(std::move(list));
  }
  return ev;
}

Vector evaluate_selected_entries(const EntryEvaluator& ev, const std::vector<int>& slot,
                                 const std::vector<ElementContactState>& states) {
  Vector out(ev.entries.size());
  for (std::size_t s = 0; s < ev.entries.size(); ++s) {
    double v = 0.0;
    for (const auto& c : ev.entries[s]) {
      const auto& st = states[slot[c.element]];
      switch (ev.op) {
        case ContactOperator::Tangent:
          v += contact_tangent_entry(st, c.a, c.b);
          break;
        case ContactOperator::ThetaNormal:
          v += contact_theta_n_entry(st, c.a);
          break;
        case ContactOperator::ThetaTangential:
          v += contact_theta_t_entry(st, c.a);
          break;
      }
    }
    out[s] = v;
  }
  return out;
}

Vector evaluate_selected_entries(const EntryEvaluator& ev, const LocalContact& local, const FeSpace& space,
                                 const Vector& w) {
  std::vector<int> slot(space.contact.size(), -1);
  for (std::size_t i = 0; i < local.elements.size(); ++i) slot[local.elements[i]] = static_cast<int>(i);
  for (int e : ev.elements()) {
    if (slot[e] < 0) throw InvalidArgument("eim: local contact misses an evaluator element");
  }
  return evaluate_selected_entries(ev, slot, local_states(local, gather_local(space, local.elements, w)));
}

AffineExpansion reduce_expansion(const EimDecomposition& d, const FeSpace& space, const ReducedBasis& basis) {
  if (basis.dofs() != space.n_dof) throw InvalidArgument("eim: basis size mismatch");
  const Matrix& Z = basis.Z;
  const int N = basis.size();
  AffineExpansion out;
  if (d.kind == EimKind::Vector) {
    out.vectors = Matrix::Zero(N, d.size());
    for (int s = 0; s < d.size(); ++s) {
      for (std::size_t p = 0; p < d.addresses.size(); ++p) {
        const double t = d.terms(p, s);
        if (t != 0.0) out.vectors.col(s) += t * Z.row(d.addresses[p][0]).transpose();
      }
    }
    return out;
  }
  // Rows of Z on the dofs the terms touch.
  std::vector<int> local(space.n_dof, -1);
  std::vector<int> dofs;
  for (const auto& a : d.addresses) {
    for (int k : a) {
      if (local[k] < 0) {
        local[k] = static_cast<int>(dofs.size());
        dofs.push_back(k);
      }
    }
  }
  Matrix Zs(dofs.size(), N);
  for (std::size_t i = 0; i < dofs.size(); ++i) Zs.row(i) = Z.row(dofs[i]);
  Matrix BZ(dofs.size(), N);
  for (int s = 0; s < d.size(); ++s) {
    BZ.setZero();
    for (std::size_t p = 0; p < d.addresses.size(); ++p) {
      const double t = d.terms(p, s);
      if (t != 0.0) BZ.row(local[d.addresses[p][0]]) += t * Zs.row(local[d.addresses[p][1]]);
    }
    out.matrices.push_back(Zs.transpose() * BZ);
  }
  return out;
}

ReducedOperators reduce_hertz_operators(const HertzModel& model, const ReducedBasis& basis, bool tangential) {
  ReducedOperators r;
  const SparseOperator K = model.reference_stiffness();
  const SparseOperator C = model.reference_correction(tangential);
  const SparseOperator M = model.reference_mass();
  const SparseOperator L = model.reference_laplacian();
  const Vector& lift = basis.lift;
  r.K = project(basis, K);
  r.C = project(basis, C);
  r.M = project(basis, M);
  r.L = project(basis, L);
  r.k_lift = basis.Z.transpose() * (K * lift);
  r.c_lift = basis.Z.transpose() * (C * lift);
  r.m_lift = basis.Z.transpose() * (M * lift);
  r.l_lift = basis.Z.transpose() * (L * lift);
  r.m_ll = lift.dot(M * lift);
  r.l_ll = lift.dot(L * lift);
  r.f = Vector::Zero(basis.size());
  r.char_length = model.config().char_length;
  return r;
}

OnlineModel make_online_model(const HertzModel& model, const FrictionModel& friction, ReducedBasis basis,
                              EimDecomposition b, EimDecomposition theta_n, EimDecomposition theta_t) {
  if (friction.kind == FrictionKind::Coulomb) throw NotApplicable("online: no reduced model for Coulomb friction");
  const FeSpace& ref = model.reference_space();
  OnlineParts p;
  p.ops = reduce_hertz_operators(model, basis, friction.tangential());
  p.rb = reduce_expansion(b, ref, basis);
  p.rn = reduce_expansion(theta_n, ref, basis);
  p.eb = make_entry_evaluator(ref, b, ContactOperator::Tangent);
  p.en = make_entry_evaluator(ref, theta_n, ContactOperator::ThetaNormal);
  if (friction.tangential()) {
    p.rt = reduce_expansion(theta_t, ref, basis);
    p.et = make_entry_evaluator(ref, theta_t, ContactOperator::ThetaTangential);
  }
  return make_online_model(model, friction, std::move(basis), std::move(b), std::move(theta_n), std::move(theta_t),
                           std::move(p));
}

OnlineModel make_online_model(const HertzModel& model, const FrictionModel& friction, ReducedBasis basis,
                              EimDecomposition b, EimDecomposition theta_n, EimDecomposition theta_t,
                              OnlineParts parts) {
  if (friction.kind == FrictionKind::Coulomb) throw NotApplicable("online: no reduced model for Coulomb friction");
  const FeSpace& ref = model.reference_space();
  OnlineModel m;
  m.model = &model;
  m.friction = friction;
  m.ops = std::move(parts.ops);
  m.rb = std::move(parts.rb);
  m.rn = std::move(parts.rn);
  m.eb = std::move(parts.eb);
  m.en = std::move(parts.en);
  m.elements = m.eb.elements();
  auto merge = [&](const std::vector<int>& extra) {
    std::vector<int> u;
    std::set_union(m.elements.begin(), m.elements.end(), extra.begin(), extra.end(), std::back_inserter(u));
    m.elements = std::move(u);
  };
  merge(m.en.elements());
  if (friction.tangential()) {
    m.rt = std::move(parts.rt);
    m.et = std::move(parts.et);
    merge(m.et.elements());
  }
  m.slot.assign(ref.contact.size(), -1);
  for (std::size_t i = 0; i < m.elements.size(); ++i) {
    const int e = m.elements[i];
    m.slot[e] = static_cast<int>(i);
    const auto& ce = ref.contact[e];
    Matrix z(ref.n_local_dofs, basis.size());
    LocalField lf{};
    for (int a = 0; a < ref.n_local_dofs; ++a) {
      z.row(a) = basis.Z.row(ce.dofs[a]);
      lf[a] = basis.lift[ce.dofs[a]];
    }
    m.z_local.push_back(std::move(z));
    m.lift_local.push_back(lf);
  }
  m.basis = std::move(basis);
  m.b = std::move(b);
  m.theta_n = std::move(theta_n);
  m.theta_t = std::move(theta_t);
  return m;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

OnlineSolution solve_reduced_eim(const OnlineModel& m, double mu, int N, const SolverConfig& config) {
  if (N < 1 || N > m.basis.size()) throw InvalidArgument("online: N must lie in [1, " + std::to_string(m.basis.size()) + "]");
  if (!(mu > 0.0)) throw InvalidArgument("online: mu must be positive");
  if (!(config.delta_u > 0.0) || config.max_iter < 1) throw InvalidArgument("solver: invalid configuration");
  const auto& ops = m.ops;
  const HertzModel& model = *m.model;
  const auto& cfg = model.config();
  const double l2 = ops.char_length * ops.char_length;
  OnlineSolution out;

  auto t0 = Clock::now();
  const Matrix A = ops.K.topLeftCorner(N, N) - ops.C.topLeftCorner(N, N) / mu;
  const Vector a_lift = ops.k_lift.head(N) - ops.c_lift.head(N) / mu;
  const Vector f = ops.f.head(N);
  const Matrix Mn = ops.M.topLeftCorner(N, N);
  const Matrix Ln = ops.L.topLeftCorner(N, N);
  Vector c = solve_reduced_system(A, f - a_lift);
  out.timings.reduced_solve += seconds_since(t0);

  t0 = Clock::now();
  const LocalContact local = make_local_contact(model.reference_space(), m.elements, model.mapping(mu),
                                                cfg.material, cfg.nitsche().gamma(), m.friction,
                                                model.gap(mu));
  out.timings.coefficients += seconds_since(t0);
  out.element_visits = m.eb.visits() + m.en.visits() + (m.tangential() ? m.et.visits() : 0);

  const int Sb = m.b.size();
  const int Sn = m.theta_n.size();
  const int St = m.tangential() ? m.theta_t.size() : 0;
  std::vector<LocalField> w(m.elements.size());
  for (int k = 0; k < config.max_iter; ++k) {
    t0 = Clock::now();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const Vector z = m.z_local[i].leftCols(N) * c;
      for (int a = 0; a < local.n_local_dofs; ++a) w[i][a] = m.lift_local[i][a] + z[a];
    }
    const auto states = local_states(local, w);
    const Vector ab = eim_online_coeffs(m.b, evaluate_selected_entries(m.eb, m.slot, states));
    const Vector an = eim_online_coeffs(m.theta_n, evaluate_selected_entries(m.en, m.slot, states));
    const Vector at = St ? eim_online_coeffs(m.theta_t, evaluate_selected_entries(m.et, m.slot, states)) : Vector();
    out.timings.coefficients += seconds_since(t0);

    t0 = Clock::now();
    Matrix J = A;
    for (int s = 0; s < Sb; ++s) J += ab[s] * m.rb.matrices[s].topLeftCorner(N, N);
    Vector r = A * c + a_lift - f;
    r += m.rn.vectors.topLeftCorner(N, Sn) * an;
    if (St) r += m.rt.vectors.topLeftCorner(N, St) * at;
    const Vector dc = solve_reduced_system(J, -r);
    c += dc;
    const double nd2 = mu * mu * dc.dot(Mn * dc) + l2 * dc.dot(Ln * dc);
    const double nu2 = mu * mu * (ops.m_ll + 2.0 * c.dot(ops.m_lift.head(N)) + c.dot(Mn * c)) +
                       l2 * (ops.l_ll + 2.0 * c.dot(ops.l_lift.head(N)) + c.dot(Ln * c));
    const double rel = nu2 > 0.0 ? std::sqrt(std::max(nd2, 0.0) / nu2) : std::numeric_limits<double>::infinity();
    out.timings.reduced_solve += seconds_since(t0);
    if (!std::isfinite(rel)) break;
    out.residual_history.push_back(rel);
    if (rel <= config.delta_u) {
      t0 = Clock::now();
      out.coeffs = c;
      out.U = m.basis.lift + m.basis.Z.leftCols(N) * c;
      out.timings.reconstruction = seconds_since(t0);
      out.k_cv = k + 1;
      out.converged = true;
      return out;
    }
  }
  throw NonConvergence("online: no convergence within " + std::to_string(config.max_iter) + " iterations at mu = " +
                           std::to_string(mu),
                       SolveState{m.basis.lift + m.basis.Z.leftCols(N) * c,
                                  static_cast<int>(out.residual_history.size()), out.residual_history});
}

}  // namespace crbm
