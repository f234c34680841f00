#include "crbm/quadrature.hpp"

#include "crbm/errors.hpp"

#include <cmath>
#include <numbers>

namespace crbm {

std::vector<LinePoint> gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("quadrature: need at least one point");
  std::vector<LinePoint> pts(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n from the Chebyshev guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    pts[n - 1 - i] = {0.5 * (x + 1.0), 0.5 * w};
  }
  return pts;
}

std::vector<LinePoint> line_rule(int order) { return gauss_legendre(std::max(1, (order + 2) / 2)); }

std::vector<TrianglePoint> triangle_rule(int order) {
  // Collapsed square: x = u, y = v (1 - u), dx dy = (1 - u) du dv.
  const auto gu = gauss_legendre(std::max(1, (order + 3) / 2));
  const auto gv = gauss_legendre(std::max(1, (order + 2) / 2));
  std::vector<TrianglePoint> pts;
  pts.reserve(gu.size() * gv.size());
  for (const auto& pu : gu) {
    for (const auto& pv : gv) {
      pts.push_back({pu.t, pv.t * (1.0 - pu.t), 2.0 * pu.w * pv.w * (1.0 - pu.t)});
    }
  }
  return pts;
}

}  // namespace crbm
