#include "crbm/fem.hpp"

#include "crbm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace crbm {

MaterialParams MaterialParams::from_young_poisson(double E, double nu) {
  if (!(E > 0.0) || !(nu > 0.0 && nu < 0.5)) {
    throw InvalidArgument("material: need E > 0 and 0 < nu < 0.5");
  }
  MaterialParams m;
  m.young_E = E;
  m.poisson_nu = nu;
  m.lame_mu = E / (2.0 * (1.0 + nu));
  m.lame_lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  return m;
}

TriangleGeometry triangle_geometry(const Vec2& a, const Vec2& b, const Vec2& c) {
  TriangleGeometry g;
  g.vertices = {a, b, c};
  const double det = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  g.area = 0.5 * det;
  g.grad_lambda[0] = Vec2(b.y() - c.y(), c.x() - b.x()) / det;
  g.grad_lambda[1] = Vec2(c.y() - a.y(), a.x() - c.x()) / det;
  g.grad_lambda[2] = Vec2(a.y() - b.y(), b.x() - a.x()) / det;
  return g;
}

int local_node_count(int degree) {
  if (degree == 1) return 3;
  if (degree == 2) return 6;
  throw UnsupportedDegree("fem: degree must be 1 or 2");
}

void shape_values(int degree, const std::array<double, 3>& l, double* out) {
  if (degree == 1) {
    out[0] = l[0];
    out[1] = l[1];
    out[2] = l[2];
    return;
  }
  for (int i = 0; i < 3; ++i) out[i] = l[i] * (2.0 * l[i] - 1.0);
  out[3] = 4.0 * l[0] * l[1];
  out[4] = 4.0 * l[1] * l[2];
  out[5] = 4.0 * l[2] * l[0];
}

void shape_gradients(int degree, const std::array<double, 3>& l, const TriangleGeometry& g, Vec2* out) {
  const auto& gl = g.grad_lambda;
  if (degree == 1) {
    out[0] = gl[0];
    out[1] = gl[1];
    out[2] = gl[2];
    return;
  }
  for (int i = 0; i < 3; ++i) out[i] = (4.0 * l[i] - 1.0) * gl[i];
  out[3] = 4.0 * (l[1] * gl[0] + l[0] * gl[1]);
  out[4] = 4.0 * (l[2] * gl[1] + l[1] * gl[2]);
  out[5] = 4.0 * (l[0] * gl[2] + l[2] * gl[0]);
}

ContactElement make_contact_element(const TriangleGeometry& g, int degree, int local_edge, const Vec2& center,
                                    const std::vector<LinePoint>& rule) {
  ContactElement ce;
  ce.local_edge = local_edge;
  const int a = local_edge;
  const int b = (local_edge + 1) % 3;
  const Vec2& va = g.vertices[a];
  const Vec2& vb = g.vertices[b];
  const double len = (vb - va).norm();
  ce.points.reserve(rule.size());
  for (const auto& q : rule) {
    ContactPoint p;
    std::array<double, 3> l{0.0, 0.0, 0.0};
    l[a] = 1.0 - q.t;
    l[b] = q.t;
    p.x = l[0] * g.vertices[0] + l[1] * g.vertices[1] + l[2] * g.vertices[2];
    p.weight = q.w * len;
    p.normal = (p.x - center).normalized();
    p.tangent = Vec2(-p.normal.y(), p.normal.x());
    shape_values(degree, l, p.phi.data());
    shape_gradients(degree, l, g, p.dphi.data());
    ce.points.push_back(p);
  }
  return ce;
}

TraceFunctionals trace_functionals(int degree, const double* phi, const Vec2* dphi, const Vec2& n, const Vec2& tau,
                                   const MaterialParams& mat) {
  TraceFunctionals f;
  const int nloc = local_node_count(degree);
  const double lam = mat.lame_lambda;
  const double mu = mat.lame_mu;
  for (int l = 0; l < nloc; ++l) {
    const Vec2& gr = dphi[l];
    const double gn = gr.dot(n);
    const double gt = gr.dot(tau);
    for (int c = 0; c < 2; ++c) {
      const int a = 2 * l + c;
      // sigma(phi e_c) = lam g_c I + mu (e_c g^T + g e_c^T)
      f.snn[a] = lam * gr[c] + 2.0 * mu * n[c] * gn;
      f.snt[a] = mu * (tau[c] * gn + n[c] * gt);
      f.vn[a] = phi[l] * n[c];
      f.vt[a] = phi[l] * tau[c];
    }
  }
  return f;
}

std::array<int, kMaxLocalDofs> FeSpace::element_dofs(std::size_t tri) const {
  std::array<int, kMaxLocalDofs> d{};
  const int nloc = n_local_dofs / 2;
  for (int l = 0; l < nloc; ++l) {
    d[2 * l] = 2 * elem_nodes[tri][l];
    d[2 * l + 1] = 2 * elem_nodes[tri][l] + 1;
  }
  return d;
}

std::size_t FeSpace::num_contact_points() const {
  std::size_t n = 0;
  for (const auto& ce : contact) n += ce.points.size();
  return n;
}

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Geometry-dependent data, recomputed for every mapped mesh.
void compute_geometry(FeSpace& s) {
  const auto& nodes = s.mesh.nodes;
  s.geometry.resize(s.mesh.triangles.size());
  for (std::size_t t = 0; t < s.mesh.triangles.size(); ++t) {
    const auto& tri = s.mesh.triangles[t];
    s.geometry[t] = triangle_geometry(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
  }
  for (auto& ce : s.contact) {
    const auto tri = ce.triangle;
    const auto dofs = ce.dofs;
    ce = make_contact_element(s.geometry[tri], s.degree, ce.local_edge, s.mesh.arc_center, s.edge_rule);
    ce.triangle = tri;
    ce.dofs = dofs;
  }
  for (auto& cn : s.contact_nodes) {
    cn.x = s.dof_coords[cn.node];
    cn.normal = (cn.x - s.mesh.arc_center).normalized();
    cn.tangent = Vec2(-cn.normal.y(), cn.normal.x());
  }
}

std::vector<int> block_positions(const SparsityPattern& p, const int* dofs, int n) {
  std::vector<int> pos(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) pos[a * n + b] = static_cast<int>(p.find(dofs[a], dofs[b]));
  }
  return pos;
}

template <class Kernel>
SparseOperator assemble_volume(const FeSpace& s, Kernel kernel, Exec exec) {
  const int L = s.n_local_dofs;
  const auto n_tri = static_cast<std::ptrdiff_t>(s.mesh.triangles.size());
  std::vector<double> local(static_cast<std::size_t>(n_tri) * L * L);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < n_tri; ++t) kernel(static_cast<std::size_t>(t), local.data() + t * L * L);
  } else {
    for (std::ptrdiff_t t = 0; t < n_tri; ++t) kernel(static_cast<std::size_t>(t), local.data() + t * L * L);
  }
  // Serial scatter in element order keeps the sums independent of threads.
  SparseOperator A(s.pattern);
  for (std::size_t i = 0; i < local.size(); ++i) A.values[s.elem_positions[i]] += local[i];
  return A;
}

}  // namespace

FeSpace build_fe_space(const Mesh& mesh, int degree, const FeOptions& opts) {
  const int nloc = local_node_count(degree);
  FeSpace s;
  s.mesh = mesh;
  s.degree = degree;
  s.n_local_dofs = 2 * nloc;
  s.triangle_rule = triangle_rule(opts.triangle_order);
  s.edge_rule = line_rule(opts.edge_order);

  const auto n_vert = static_cast<int>(mesh.nodes.size());
  std::unordered_map<std::uint64_t, int> midpoint;
  std::unordered_map<std::uint64_t, std::pair<std::uint32_t, int>> owner;
  s.dof_coords = mesh.nodes;
  s.elem_nodes.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    auto& en = s.elem_nodes[t];
    en.fill(-1);
    for (int i = 0; i < 3; ++i) en[i] = static_cast<int>(tri[i]);
    for (int e = 0; e < 3; ++e) {
      const auto key = edge_key(tri[e], tri[(e + 1) % 3]);
      owner.emplace(key, std::make_pair(static_cast<std::uint32_t>(t), e));
      if (degree == 2) {
        auto [it, inserted] = midpoint.emplace(key, static_cast<int>(s.dof_coords.size()));
        if (inserted) s.dof_coords.push_back(0.5 * (mesh.nodes[tri[e]] + mesh.nodes[tri[(e + 1) % 3]]));
        en[3 + e] = it->second;
      }
    }
  }
  s.n_nodes = static_cast<int>(s.dof_coords.size());
  s.n_dof = 2 * s.n_nodes;
  (void)n_vert;

  auto edge_nodes = [&](const BoundaryEdge& be) {
    std::vector<int> out = {static_cast<int>(be.nodes[0]), static_cast<int>(be.nodes[1])};
    if (degree == 2) out.push_back(midpoint.at(edge_key(be.nodes[0], be.nodes[1])));
    return out;
  };

  s.is_dirichlet.assign(s.n_dof, 0);
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag != BoundaryTag::Dirichlet) continue;
    for (int n : edge_nodes(be)) s.is_dirichlet[2 * n] = s.is_dirichlet[2 * n + 1] = 1;
  }
  for (int d = 0; d < s.n_dof; ++d) {
    if (s.is_dirichlet[d]) s.dirichlet_dofs.push_back(d);
  }

  std::map<int, int> contact_node_index;
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag != BoundaryTag::Contact) continue;
    const auto [tri, e] = owner.at(edge_key(be.nodes[0], be.nodes[1]));
    ContactElement ce;
    ce.triangle = tri;
    ce.local_edge = e;
    ce.dofs.fill(-1);
    for (int l = 0; l < nloc; ++l) {
      ce.dofs[2 * l] = 2 * s.elem_nodes[tri][l];
      ce.dofs[2 * l + 1] = 2 * s.elem_nodes[tri][l] + 1;
    }
    const int elem_index = static_cast<int>(s.contact.size());
    s.contact.push_back(ce);

    std::vector<std::pair<int, std::array<double, 3>>> on_edge;
    std::array<double, 3> la{0, 0, 0}, lb{0, 0, 0}, lm{0, 0, 0};
    la[e] = 1.0;
    lb[(e + 1) % 3] = 1.0;
    lm[e] = lm[(e + 1) % 3] = 0.5;
    on_edge.emplace_back(s.elem_nodes[tri][e], la);
    on_edge.emplace_back(s.elem_nodes[tri][(e + 1) % 3], lb);
    if (degree == 2) on_edge.emplace_back(s.elem_nodes[tri][3 + e], lm);
    for (const auto& [node, lam] : on_edge) {
      auto [it, inserted] = contact_node_index.emplace(node, static_cast<int>(s.contact_nodes.size()));
      if (inserted) {
        ContactNode cn;
        cn.node = node;
        s.contact_nodes.push_back(cn);
      }
      s.contact_nodes[it->second].samples.push_back({elem_index, lam});
    }
  }
  for (const auto& [node, idx] : contact_node_index) {
    s.contact_dofs.push_back(2 * node);
    s.contact_dofs.push_back(2 * node + 1);
  }

  const int L = s.n_local_dofs;
  std::vector<std::vector<int>> blocks(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto d = s.element_dofs(t);
    blocks[t].assign(d.begin(), d.begin() + L);
  }
  s.pattern = SparsityPattern::from_blocks(s.n_dof, blocks);
  s.elem_positions.reserve(mesh.triangles.size() * L * L);
  for (const auto& b : blocks) {
    const auto pos = block_positions(*s.pattern, b.data(), L);
    s.elem_positions.insert(s.elem_positions.end(), pos.begin(), pos.end());
  }

  std::vector<std::vector<int>> cblocks;
  for (const auto& ce : s.contact) cblocks.emplace_back(ce.dofs.begin(), ce.dofs.begin() + L);
  s.contact_pattern = SparsityPattern::from_blocks(s.n_dof, cblocks);
  for (const auto& b : cblocks) {
    const auto pos = block_positions(*s.contact_pattern, b.data(), L);
    s.contact_positions.insert(s.contact_positions.end(), pos.begin(), pos.end());
    s.contact_support.insert(s.contact_support.end(), b.begin(), b.end());
  }
  std::sort(s.contact_support.begin(), s.contact_support.end());
  s.contact_support.erase(std::unique(s.contact_support.begin(), s.contact_support.end()), s.contact_support.end());
  const auto& cp = *s.contact_pattern;
  s.contact_to_global.resize(cp.nnz());
  for (int i = 0; i < cp.rows(); ++i) {
    for (int p = cp.indptr()[i]; p < cp.indptr()[i + 1]; ++p) {
      s.contact_to_global[p] = static_cast<int>(s.pattern->find(i, cp.indices()[p]));
    }
  }

  compute_geometry(s);
  for (const auto& g : s.geometry) {
    if (!(g.area > 0.0)) throw MeshFailure("fem: degenerate triangle");
  }
  return s;
}

FeSpace map_fe_space(const FeSpace& reference, const GeometricMapping& map) {
  FeSpace s = reference;
  s.mesh = apply_mapping(reference.mesh, map);
  for (auto& p : s.dof_coords) p = map(p);
  compute_geometry(s);
  return s;
}

ContactElement map_contact_element(const FeSpace& reference, std::size_t e, const GeometricMapping& map) {
  const auto& ref = reference.contact[e];
  const auto& tri = reference.mesh.triangles[ref.triangle];
  const auto& nodes = reference.mesh.nodes;
  const auto g = triangle_geometry(map(nodes[tri[0]]), map(nodes[tri[1]]), map(nodes[tri[2]]));
  ContactElement ce = make_contact_element(g, reference.degree, ref.local_edge, map(reference.mesh.arc_center),
                                           reference.edge_rule);
  ce.triangle = ref.triangle;
  ce.dofs = ref.dofs;
  return ce;
}

SparseOperator assemble_elasticity(const FeSpace& s, const MaterialParams& mat, Exec exec) {
  const int L = s.n_local_dofs;
  const int nloc = L / 2;
  const double lam = mat.lame_lambda;
  const double mu = mat.lame_mu;
  auto kernel = [&](std::size_t t, double* K) {
    std::fill(K, K + L * L, 0.0);
    const auto& g = s.geometry[t];
    std::array<Vec2, kMaxLocalNodes> grad;
    for (const auto& q : s.triangle_rule) {
      shape_gradients(s.degree, {1.0 - q.l1 - q.l2, q.l1, q.l2}, g, grad.data());
      const double w = q.w * g.area;
      for (int l = 0; l < nloc; ++l) {
        for (int m = 0; m < nloc; ++m) {
          const double gg = grad[l].dot(grad[m]);
          for (int c = 0; c < 2; ++c) {
            for (int d = 0; d < 2; ++d) {
              const double v = lam * grad[l][c] * grad[m][d] + mu * ((c == d ? gg : 0.0) + grad[l][d] * grad[m][c]);
              K[(2 * l + c) * L + 2 * m + d] += w * v;
            }
          }
        }
      }
    }
  };
  return assemble_volume(s, kernel, exec);
}

SparseOperator assemble_mass(const FeSpace& s, Exec exec) {
  const int L = s.n_local_dofs;
  const int nloc = L / 2;
  auto kernel = [&](std::size_t t, double* M) {
    std::fill(M, M + L * L, 0.0);
    const auto& g = s.geometry[t];
    std::array<double, kMaxLocalNodes> phi;
    for (const auto& q : s.triangle_rule) {
      shape_values(s.degree, {1.0 - q.l1 - q.l2, q.l1, q.l2}, phi.data());
      const double w = q.w * g.area;
      for (int l = 0; l < nloc; ++l) {
        for (int m = 0; m < nloc; ++m) {
          const double v = w * phi[l] * phi[m];
          M[(2 * l) * L + 2 * m] += v;
          M[(2 * l + 1) * L + 2 * m + 1] += v;
        }
      }
    }
  };
  return assemble_volume(s, kernel, exec);
}

SparseOperator assemble_vector_laplacian(const FeSpace& s, Exec exec) {
  const int L = s.n_local_dofs;
  const int nloc = L / 2;
  auto kernel = [&](std::size_t t, double* K) {
    std::fill(K, K + L * L, 0.0);
    const auto& g = s.geometry[t];
    std::array<Vec2, kMaxLocalNodes> grad;
    for (const auto& q : s.triangle_rule) {
      shape_gradients(s.degree, {1.0 - q.l1 - q.l2, q.l1, q.l2}, g, grad.data());
      const double w = q.w * g.area;
      for (int l = 0; l < nloc; ++l) {
        for (int m = 0; m < nloc; ++m) {
          const double v = w * grad[l].dot(grad[m]);
          K[(2 * l) * L + 2 * m] += v;
          K[(2 * l + 1) * L + 2 * m + 1] += v;
        }
      }
    }
  };
  return assemble_volume(s, kernel, exec);
}

SparseOperator assemble_h1_gram(const FeSpace& space, double char_length, Exec exec) {
  if (char_length < 0.0) throw InvalidArgument("fem: characteristic length must be nonnegative");
  return axpy(assemble_mass(space, exec), char_length * char_length, assemble_vector_laplacian(space, exec));
}

Vector assemble_load(const FeSpace& s, const std::function<Vec2(const Vec2&)>& body_force) {
  Vector F = Vector::Zero(s.n_dof);
  const int nloc = s.n_local_dofs / 2;
  std::array<double, kMaxLocalNodes> phi;
  for (std::size_t t = 0; t < s.mesh.triangles.size(); ++t) {
    const auto& g = s.geometry[t];
    for (const auto& q : s.triangle_rule) {
      const std::array<double, 3> l{1.0 - q.l1 - q.l2, q.l1, q.l2};
      shape_values(s.degree, l, phi.data());
      const Vec2 x = l[0] * g.vertices[0] + l[1] * g.vertices[1] + l[2] * g.vertices[2];
      const Vec2 f = body_force(x);
      const double w = q.w * g.area;
      for (int a = 0; a < nloc; ++a) {
        F[2 * s.elem_nodes[t][a]] += w * phi[a] * f.x();
        F[2 * s.elem_nodes[t][a] + 1] += w * phi[a] * f.y();
      }
    }
  }
  return F;
}

BoundaryTrace boundary_stress_trace(const FeSpace& s, const MaterialParams& mat, const Vector& U) {
  if (U.size() != s.n_dof) throw InvalidArgument("fem: field size mismatch");
  const int L = s.n_local_dofs;
  BoundaryTrace tr;
  for (const auto& ce : s.contact) {
    for (const auto& p : ce.points) {
      const auto f = trace_functionals(s.degree, p.phi.data(), p.dphi.data(), p.normal, p.tangent, mat);
      double snn = 0, snt = 0, vn = 0, vt = 0;
      for (int a = 0; a < L; ++a) {
        const double u = U[ce.dofs[a]];
        snn += f.snn[a] * u;
        snt += f.snt[a] * u;
        vn += f.vn[a] * u;
        vt += f.vt[a] * u;
      }
      tr.sigma_nn.push_back(snn);
      tr.sigma_nt.push_back(snt);
      tr.u_n.push_back(vn);
      tr.u_t.push_back(vt);
    }
  }
  std::array<double, kMaxLocalNodes> phi;
  std::array<Vec2, kMaxLocalNodes> dphi;
  for (const auto& cn : s.contact_nodes) {
    double snn = 0, snt = 0, vn = 0, vt = 0;
    for (const auto& smp : cn.samples) {
      const auto& ce = s.contact[smp.element];
      shape_values(s.degree, smp.lambda, phi.data());
      shape_gradients(s.degree, smp.lambda, s.geometry[ce.triangle], dphi.data());
      const auto f = trace_functionals(s.degree, phi.data(), dphi.data(), cn.normal, cn.tangent, mat);
      for (int a = 0; a < L; ++a) {
        const double u = U[ce.dofs[a]];
        snn += f.snn[a] * u;
        snt += f.snt[a] * u;
        vn += f.vn[a] * u;
        vt += f.vt[a] * u;
      }
    }
    const double k = static_cast<double>(cn.samples.size());
    tr.node_sigma_nn.push_back(snn / k);
    tr.node_sigma_nt.push_back(snt / k);
    tr.node_u_n.push_back(vn / k);
    tr.node_u_t.push_back(vt / k);
  }
  return tr;
}

Vector dirichlet_values(const FeSpace& s, const std::function<Vec2(const Vec2&)>& g) {
  Vector v = Vector::Zero(s.n_dof);
  for (int d : s.dirichlet_dofs) v[d] = g(s.dof_coords[d / 2])[d % 2];
  return v;
}

}  // namespace crbm
