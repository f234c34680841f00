#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <vector>

namespace crbm {

using Vec2 = Eigen::Vector2d;

enum class BoundaryTag : std::uint8_t { Dirichlet = 0, Neumann = 1, Contact = 2 };

struct BoundaryEdge {
  std::array<std::uint32_t, 2> nodes;
  BoundaryTag tag;
};

// Closed interval of polar angles, measured from the positive x axis.
struct AngleInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Element size grows linearly with the distance to the contact arc (and its
// mirror image) and is capped at max_size.
struct MeshGrading {
  double growth = 0.3;
  double max_size = 0.1;
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  double mesh_size_h = 0.0;
  Vec2 arc_center = Vec2::Zero();
  double arc_radius = 1.0;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
};

struct GeometricMapping {
  double mu = 1.0;
  Vec2 center = Vec2::Zero();

  Vec2 operator()(const Vec2& x) const { return center + mu * (x - center); }
};

/// Unit half-disk below the flat edge y = 0, centered at the origin.
Mesh build_reference_halfdisk(double h_target, AngleInterval contact_arc,
                              const MeshGrading& grading = {});

Mesh apply_mapping(const Mesh& mesh, const GeometricMapping& map);

double triangle_signed_area(const Mesh& mesh, std::size_t tri);

// Throws MeshFailure on nonpositive areas, nonconforming edges or untagged
// boundary edges.
void validate_mesh(const Mesh& mesh);

// perm[i] is the node at the reflection of node i across x = arc_center.x.
// Throws MeshFailure if some node has no mirror image within tol.
std::vector<std::uint32_t> mirror_permutation(const Mesh& mesh, double tol = 1e-12);

std::size_t count_tagged_nodes(const Mesh& mesh, BoundaryTag tag);

}  // namespace crbm
