#pragma once

#include <vector>

namespace crbm {

struct LinePoint {
  double t;  // in [0, 1]
  double w;  // weights sum to 1
};

struct TrianglePoint {
  double l1;  // barycentric coordinates; l0 = 1 - l1 - l2
  double l2;
  double w;  // weights sum to 1
};

std::vector<LinePoint> gauss_legendre(int n_points);

// Exact for polynomials of total degree <= order.
std::vector<LinePoint> line_rule(int order);
std::vector<TrianglePoint> triangle_rule(int order);

}  // namespace crbm
