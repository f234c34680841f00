#include "crbm/mesh.hpp"

#include "crbm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>
#include <utility>

namespace crbm {

namespace {

constexpr double kPi = std::numbers::pi;

struct Interval {
  double a;
  double b;
};

// Contact arc and its mirror image, clipped to the left quarter [-pi, -pi/2].
std::vector<Interval> refined_intervals(AngleInterval arc) {
  std::vector<Interval> raw = {{arc.lo, arc.hi}, {-kPi - arc.hi, -kPi - arc.lo}};
  std::vector<Interval> out;
  for (auto iv : raw) {
    iv.a = std::max(iv.a, -kPi);
    iv.b = std::min(iv.b, -kPi / 2);
    if (iv.a <= iv.b) out.push_back(iv);
  }
  std::sort(out.begin(), out.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });
  std::vector<Interval> merged;
  for (const auto& iv : out) {
    if (!merged.empty() && iv.a <= merged.back().b) {
      merged.back().b = std::max(merged.back().b, iv.b);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

double distance_to_arcs(double r, double theta, const std::vector<Interval>& arcs) {
  double best = std::numeric_limits<double>::infinity();
  const double px = r * std::cos(theta);
  const double py = r * std::sin(theta);
  for (const auto& iv : arcs) {
    if (theta >= iv.a && theta <= iv.b) {
      best = std::min(best, 1.0 - r);
      continue;
    }
    for (double e : {iv.a, iv.b}) {
      best = std::min(best, std::hypot(px - std::cos(e), py - std::sin(e)));
    }
  }
  return best;
}

struct SizeField {
  double h;
  double growth;
  double hmax;
  std::vector<Interval> arcs;

  double operator()(double r, double theta) const {
    return std::min(hmax, h + growth * distance_to_arcs(r, theta, arcs));
  }
};

// Angles in [-pi, -pi/2] equidistributing r / size along the ring, with
// every breakpoint kept as a node.
std::vector<double> ring_angles(double r, const SizeField& size, const std::vector<double>& breaks) {
  constexpr int kSamples = 2000;
  std::vector<double> angles = {breaks.front()};
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s];
    const double b = breaks[s + 1];
    std::vector<double> cum(kSamples + 1, 0.0);
    const double dt = (b - a) / kSamples;
    double prev = r / size(r, a);
    for (int i = 1; i <= kSamples; ++i) {
      const double cur = r / size(r, a + i * dt);
      cum[i] = cum[i - 1] + 0.5 * (prev + cur) * dt;
      prev = cur;
    }
    const int n = std::max(1, static_cast<int>(std::lround(cum.back())));
    for (int k = 1; k < n; ++k) {
      const double target = cum.back() * k / n;
      auto it = std::lower_bound(cum.begin(), cum.end(), target);
      const auto i = static_cast<int>(it - cum.begin());
      const double f = (target - cum[i - 1]) / (cum[i] - cum[i - 1]);
      angles.push_back(a + (i - 1 + f) * dt);
    }
    angles.push_back(b);
  }
  return angles;
}

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

Mesh build_reference_halfdisk(double h_target, AngleInterval contact_arc, const MeshGrading& grading) {
  if (!(h_target > 0.0) || !std::isfinite(h_target)) {
    throw InvalidArgument("mesh: h_target must be positive");
  }
  constexpr double eps = 1e-12;
  if (!(contact_arc.lo < contact_arc.hi) || contact_arc.lo < -kPi - eps || contact_arc.hi > eps) {
    throw InvalidArc("mesh: contact arc must be a nonempty subinterval of [-pi, 0]");
  }
  if (!(grading.growth >= 0.0) || !(grading.max_size > 0.0)) {
    throw InvalidArgument("mesh: invalid grading");
  }

  SizeField size{h_target, grading.growth, std::max(grading.max_size, h_target),
                 refined_intervals(contact_arc)};

  std::vector<double> breaks = {-kPi};
  for (const auto& iv : size.arcs) {
    for (double e : {iv.a, iv.b}) {
      if (e > -kPi + eps && e < -kPi / 2 - eps) breaks.push_back(e);
    }
  }
  breaks.push_back(-kPi / 2);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               breaks.end());

  // Ring radii, spaced by the size field on the contact arc.
  std::vector<double> radii = {1.0};
  for (;;) {
    const double r = radii.back();
    const double dr = std::min(size.hmax, h_target + grading.growth * (1.0 - r));
    const double next = r - dr;
    if (next < 0.6 * dr) break;
    radii.push_back(next);
  }

  Mesh mesh;
  mesh.mesh_size_h = h_target;
  mesh.arc_center = Vec2::Zero();
  mesh.arc_radius = 1.0;

  std::vector<std::size_t> base;    // first global node of each ring
  std::vector<std::size_t> half;    // m: index of the axis node within the ring
  for (double r : radii) {
    const std::vector<double> left = ring_angles(r, size, breaks);
    const std::size_t m = left.size() - 1;
    base.push_back(mesh.nodes.size());
    half.push_back(m);
    const std::size_t first = mesh.nodes.size();
    for (std::size_t k = 0; k < m; ++k) {
      if (k == 0) {
        mesh.nodes.emplace_back(-r, 0.0);
      } else {
        mesh.nodes.emplace_back(r * std::cos(left[k]), r * std::sin(left[k]));
      }
    }
    mesh.nodes.emplace_back(0.0, -r);
    for (std::size_t k = m + 1; k <= 2 * m; ++k) {
      const Vec2 p = mesh.nodes[first + 2 * m - k];
      mesh.nodes.emplace_back(-p.x(), p.y());
    }
  }
  const auto origin = static_cast<std::uint32_t>(mesh.nodes.size());
  mesh.nodes.emplace_back(0.0, 0.0);

  auto gid = [&](std::size_t ring, std::size_t k) {
    return static_cast<std::uint32_t>(base[ring] + k);
  };
  auto mirror = [&](std::size_t ring, std::size_t k) { return gid(ring, 2 * half[ring] - k); };

  for (std::size_t ring = 0; ring + 1 < radii.size(); ++ring) {
    const std::size_t m = half[ring];
    const std::size_t n = half[ring + 1];
    std::vector<double> outer(m + 1), inner(n + 1);
    for (std::size_t k = 0; k <= m; ++k) {
      const Vec2& p = mesh.nodes[gid(ring, k)];
      outer[k] = std::atan2(p.y(), p.x());
    }
    for (std::size_t k = 0; k <= n; ++k) {
      const Vec2& p = mesh.nodes[gid(ring + 1, k)];
      inner[k] = std::atan2(p.y(), p.x());
    }
    outer[0] = inner[0] = -kPi;

    std::size_t i = 0, j = 0;
    std::vector<std::array<std::size_t, 6>> local;  // (ring, k) pairs of a triangle
    while (i < m || j < n) {
      const bool advance_outer = (j == n) || (i < m && outer[i + 1] <= inner[j + 1]);
      if (advance_outer) {
        local.push_back({ring, i, ring, i + 1, ring + 1, j});
        ++i;
      } else {
        local.push_back({ring, i, ring + 1, j + 1, ring + 1, j});
        ++j;
      }
    }
    for (const auto& t : local) {
      mesh.triangles.push_back({gid(t[0], t[1]), gid(t[2], t[3]), gid(t[4], t[5])});
    }
    for (const auto& t : local) {
      mesh.triangles.push_back({mirror(t[0], t[1]), mirror(t[4], t[5]), mirror(t[2], t[3])});
    }
  }
  const std::size_t last = radii.size() - 1;
  for (std::size_t k = 0; k < 2 * half[last]; ++k) {
    mesh.triangles.push_back({gid(last, k), gid(last, k + 1), origin});
  }

  for (std::size_t k = 0; k < 2 * half[0]; ++k) {
    const std::uint32_t a = gid(0, k);
    const std::uint32_t b = gid(0, k + 1);
    const Vec2 mid = 0.5 * (mesh.nodes[a] + mesh.nodes[b]);
    const double theta = std::atan2(mid.y(), mid.x());
    const bool contact = theta >= contact_arc.lo && theta <= contact_arc.hi;
    mesh.boundary_edges.push_back({{a, b}, contact ? BoundaryTag::Contact : BoundaryTag::Neumann});
  }
  for (std::size_t ring = 0; ring < last; ++ring) {
    mesh.boundary_edges.push_back(
        {{gid(ring, 2 * half[ring]), gid(ring + 1, 2 * half[ring + 1])}, BoundaryTag::Dirichlet});
  }
  mesh.boundary_edges.push_back({{gid(last, 2 * half[last]), origin}, BoundaryTag::Dirichlet});
  mesh.boundary_edges.push_back({{origin, gid(last, 0)}, BoundaryTag::Dirichlet});
  for (std::size_t ring = last; ring-- > 0;) {
    mesh.boundary_edges.push_back({{gid(ring + 1, 0), gid(ring, 0)}, BoundaryTag::Dirichlet});
  }

  validate_mesh(mesh);
  return mesh;
}

Mesh apply_mapping(const Mesh& mesh, const GeometricMapping& map) {
  Mesh out = mesh;
  for (auto& p : out.nodes) p = map(p);
  out.arc_center = map(mesh.arc_center);
  out.arc_radius = map.mu * mesh.arc_radius;
  out.mesh_size_h = map.mu * mesh.mesh_size_h;
  return out;
}

double triangle_signed_area(const Mesh& mesh, std::size_t tri) {
  const auto& t = mesh.triangles[tri];
  const Vec2 e1 = mesh.nodes[t[1]] - mesh.nodes[t[0]];
  const Vec2 e2 = mesh.nodes[t[2]] - mesh.nodes[t[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

void validate_mesh(const Mesh& mesh) {
  const std::size_t n = mesh.nodes.size();
  std::unordered_map<std::uint64_t, int> edge_count;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (auto v : tri) {
      if (v >= n) throw MeshFailure("mesh: triangle references a missing node");
    }
    if (!(triangle_signed_area(mesh, t) > 0.0)) {
      throw MeshFailure("mesh: triangle " + std::to_string(t) + " has nonpositive area");
    }
    for (int e = 0; e < 3; ++e) ++edge_count[edge_key(tri[e], tri[(e + 1) % 3])];
  }
  std::unordered_map<std::uint64_t, int> tagged;
  for (const auto& be : mesh.boundary_edges) {
    const auto key = edge_key(be.nodes[0], be.nodes[1]);
    if (++tagged[key] > 1) throw MeshFailure("mesh: boundary edge tagged twice");
    auto it = edge_count.find(key);
    if (it == edge_count.end() || it->second != 1) {
      throw MeshFailure("mesh: tagged edge is not a boundary edge");
    }
  }
  for (const auto& [key, count] : edge_count) {
    if (count > 2) throw MeshFailure("mesh: edge shared by more than two triangles");
    if (count == 1 && !tagged.count(key)) throw MeshFailure("mesh: untagged boundary edge");
  }
}

std::vector<std::uint32_t> mirror_permutation(const Mesh& mesh, double tol) {
  const double cell = std::max(4.0 * tol, 1e-12);
  auto key = [cell](double x, double y) {
    const auto ix = static_cast<std::int64_t>(std::floor(x / cell));
    const auto iy = static_cast<std::int64_t>(std::floor(y / cell));
    return std::make_pair(ix, iy);
  };
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::uint32_t>> grid;
  for (std::uint32_t i = 0; i < mesh.nodes.size(); ++i) {
    grid[key(mesh.nodes[i].x(), mesh.nodes[i].y())].push_back(i);
  }
  const double cx = mesh.arc_center.x();
  std::vector<std::uint32_t> perm(mesh.nodes.size());
  for (std::uint32_t i = 0; i < mesh.nodes.size(); ++i) {
    const Vec2 target(2.0 * cx - mesh.nodes[i].x(), mesh.nodes[i].y());
    const auto [kx, ky] = key(target.x(), target.y());
    bool found = false;
    for (std::int64_t dx = -1; dx <= 1 && !found; ++dx) {
      for (std::int64_t dy = -1; dy <= 1 && !found; ++dy) {
        auto it = grid.find({kx + dx, ky + dy});
        if (it == grid.end()) continue;
        for (auto j : it->second) {
          if ((mesh.nodes[j] - target).lpNorm<Eigen::Infinity>() <= tol) {
            perm[i] = j;
            found = true;
            break;
          }
        }
      }
    }
    if (!found) throw MeshFailure("mesh: node " + std::to_string(i) + " has no mirror image");
  }
  return perm;
}

std::size_t count_tagged_nodes(const Mesh& mesh, BoundaryTag tag) {
  std::vector<std::uint32_t> ids;
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag != tag) continue;
    ids.push_back(be.nodes[0]);
    ids.push_back(be.nodes[1]);
  }
  std::sort(ids.begin(), ids.end());
  return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

}  // namespace crbm
