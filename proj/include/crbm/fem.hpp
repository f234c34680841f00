#pragma once

#include "crbm/mesh.hpp"
#include "crbm/quadrature.hpp"
#include "crbm/sparse.hpp"

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace crbm {

enum class Exec { Serial, Parallel };

constexpr int kMaxLocalNodes = 6;
constexpr int kMaxLocalDofs = 12;

struct MaterialParams {
  double young_E = 0.0;
  double poisson_nu = 0.0;
  double lame_lambda = 0.0;
  double lame_mu = 0.0;

  static MaterialParams from_young_poisson(double E, double nu);
};

struct TriangleGeometry {
  std::array<Vec2, 3> vertices;
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda;
};

TriangleGeometry triangle_geometry(const Vec2& a, const Vec2& b, const Vec2& c);

int local_node_count(int degree);

// P2 ordering: vertices 0..2, then edge midpoints (0,1), (1,2), (2,0).
void shape_values(int degree, const std::array<double, 3>& lambda, double* out);
void shape_gradients(int degree, const std::array<double, 3>& lambda, const TriangleGeometry& g, Vec2* out);

struct ContactPoint {
  Vec2 x = Vec2::Zero();
  double weight = 0.0;
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  std::array<double, kMaxLocalNodes> phi{};
  std::array<Vec2, kMaxLocalNodes> dphi{};
};

// Quadrature data of one contact edge; local_edge e joins vertices e and e+1.
struct ContactElement {
  std::uint32_t triangle = 0;
  int local_edge = 0;
  std::array<int, kMaxLocalDofs> dofs{};
  std::vector<ContactPoint> points;
};

// n is the outward normal of the circle through x about center; tau = (-n_y, n_x).
ContactElement make_contact_element(const TriangleGeometry& g, int degree, int local_edge, const Vec2& center,
                                    const std::vector<LinePoint>& rule);

// Coefficients of the linear maps U -> sigma_nn, sigma_ntau, u_n, u_tau at a
// point, over the local dofs of its element.
struct TraceFunctionals {
  std::array<double, kMaxLocalDofs> snn{};
  std::array<double, kMaxLocalDofs> snt{};
  std::array<double, kMaxLocalDofs> vn{};
  std::array<double, kMaxLocalDofs> vt{};
};

TraceFunctionals trace_functionals(int degree, const double* phi, const Vec2* dphi, const Vec2& n, const Vec2& tau,
                                   const MaterialParams& mat);

struct ContactNodeSample {
  int element = 0;  // index into FeSpace::contact
  std::array<double, 3> lambda{};
};

struct ContactNode {
  int node = 0;
  Vec2 x = Vec2::Zero();
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  std::vector<ContactNodeSample> samples;
};

struct FeOptions {
  int triangle_order = 4;
  int edge_order = 6;
};

struct FeSpace {
  Mesh mesh;
  int degree = 2;
  int n_nodes = 0;
  int n_dof = 0;
  int n_local_dofs = 0;
  std::vector<Vec2> dof_coords;  // one point per Lagrange node
  std::vector<std::array<int, kMaxLocalNodes>> elem_nodes;
  std::vector<TriangleGeometry> geometry;

  std::vector<int> dirichlet_dofs;
  std::vector<char> is_dirichlet;
  std::vector<int> contact_dofs;  // dofs of Lagrange nodes on contact edges
  std::vector<ContactElement> contact;
  std::vector<ContactNode> contact_nodes;

  std::vector<TrianglePoint> triangle_rule;
  std::vector<LinePoint> edge_rule;

  std::shared_ptr<const SparsityPattern> pattern;
  std::vector<int> elem_positions;  // n_tri x n_local_dofs^2 storage slots

  std::shared_ptr<const SparsityPattern> contact_pattern;
  std::vector<int> contact_positions;  // per contact element, slots in contact_pattern
  std::vector<int> contact_to_global;  // contact_pattern slot -> pattern slot
  std::vector<int> contact_support;    // sorted dofs touched by contact elements

  std::array<int, kMaxLocalDofs> element_dofs(std::size_t tri) const;
  std::size_t num_contact_points() const;
};

FeSpace build_fe_space(const Mesh& mesh, int degree, const FeOptions& opts = {});

// Same topology and patterns, geometry of the mapped mesh.
FeSpace map_fe_space(const FeSpace& reference, const GeometricMapping& map);

// Contact element e of map_fe_space(reference, map), built without mapping
// the rest of the mesh. Bit-identical to the full construction.
ContactElement map_contact_element(const FeSpace& reference, std::size_t e, const GeometricMapping& map);

SparseOperator assemble_elasticity(const FeSpace& space, const MaterialParams& mat, Exec exec = Exec::Parallel);
SparseOperator assemble_mass(const FeSpace& space, Exec exec = Exec::Parallel);
// Gradient part of the H1 inner product, int grad u : grad v.
SparseOperator assemble_vector_laplacian(const FeSpace& space, Exec exec = Exec::Parallel);
SparseOperator assemble_h1_gram(const FeSpace& space, double char_length, Exec exec = Exec::Parallel);

Vector assemble_load(const FeSpace& space, const std::function<Vec2(const Vec2&)>& body_force);

struct BoundaryTrace {
  // Per contact quadrature point, element-major.
  std::vector<double> sigma_nn, sigma_nt, u_n, u_t;
  // Per contact node; stresses averaged over adjacent contact edges.
  std::vector<double> node_sigma_nn, node_sigma_nt, node_u_n, node_u_t;
};

BoundaryTrace boundary_stress_trace(const FeSpace& space, const MaterialParams& mat, const Vector& U);

// Dirichlet values: every constrained dof takes g(x) at its Lagrange node.
Vector dirichlet_values(const FeSpace& space, const std::function<Vec2(const Vec2&)>& g);

}  // namespace crbm
