#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace crbm;

TEST_CASE("neg_part and heaviside") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const double z = u(rng);
    CHECK(neg_part(z) == std::min(z, 0.0));
    CHECK(neg_part(z) + std::max(z, 0.0) == z);
    CHECK(heaviside(z) == (z >= 0.0 ? 1.0 : 0.0));
  }
  CHECK(neg_part(0.0) == 0.0);
  CHECK(heaviside(0.0) == 1.0);
  CHECK(neg_part(-0.0) == 0.0);
}

TEST_CASE("proj_ball clamps and is idempotent") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> x(-10.0, 10.0), r(0.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double xi = x(rng), ri = r(rng);
    const double p = proj_ball(xi, ri);
    CHECK(p == std::clamp(xi, -ri, ri));
    CHECK(std::abs(p) <= ri);
    CHECK(proj_ball(p, ri) == p);
    // Odd in x.
    CHECK(proj_ball(-xi, ri) == -p);
  }
  CHECK(proj_ball(3.0, 0.0) == 0.0);
  CHECK_THROWS_AS(proj_ball(1.0, -1.0), InvalidArgument);
}

TEST_CASE("ball_proj_jacobian matches difference quotients off the kinks") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> x(-10.0, 10.0), r(0.1, 5.0);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const double xi = x(rng), s = r(rng);
    const double eps = 1e-6;
    if (std::abs(std::abs(xi) - s) < 10 * eps) continue;
    const double fd = (proj_ball(xi + eps, s) - proj_ball(xi - eps, s)) / (2 * eps);
    CHECK(std::abs(fd - ball_proj_jacobian(xi, s)) <= 1e-9);
    ++checked;
  }
  CHECK(checked > 9000);
  CHECK(ball_proj_jacobian(1.0, 1.0) == 1.0);
  CHECK(ball_proj_jacobian(-1.0, 1.0) == 1.0);
}

namespace {

// sigma(u) n . n and friends from the shape gradients at a point.
struct PointTrace {
  double snn, snt, vn, vt;
};

PointTrace direct_trace(const ContactPoint& p, const std::array<int, kMaxLocalDofs>& dofs, int nloc,
                        const MaterialParams& m, const Vector& U) {
  Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
  Vec2 u = Vec2::Zero();
  for (int a = 0; a < nloc; ++a) {
    const Vec2 ua(U[dofs[2 * a]], U[dofs[2 * a + 1]]);
    g += ua * p.dphi[a].transpose();
    u += p.phi[a] * ua;
  }
  const Eigen::Matrix2d eps = 0.5 * (g + g.transpose());
  const Eigen::Matrix2d sig = m.lame_lambda * eps.trace() * Eigen::Matrix2d::Identity() + 2.0 * m.lame_mu * eps;
  const Vec2 sn = sig * p.normal;
  return {p.normal.dot(sn), p.tangent.dot(sn), u.dot(p.normal), u.dot(p.tangent)};
}

}  // namespace

TEST_CASE("contact traces agree with pointwise stresses and satisfy the P identities") {
  const auto& model = test::coarse_tresca_model();
  const auto inst = model.instance(1.1);
  const auto& setup = inst.problem.contact;
  const auto& space = *inst.space;
  const double gamma = setup.gamma;
  std::mt19937_64 rng(4);
  std::size_t points = 0;
  double worst = 0.0, worst_id = 0.0;
  while (points < 10000) {
    const Vector U = test::random_vector(rng, space.n_dof, 0.05);
    const auto tr = eval_contact_traces(setup, U);
    std::size_t q = 0;
    for (const auto& ce : space.contact) {
      for (const auto& p : ce.points) {
        const auto d = direct_trace(p, ce.dofs, space.n_local_dofs / 2, model.config().material, U);
        const double scale = 1.0 + std::abs(d.snn) + std::abs(d.snt);
        worst = std::max({worst, std::abs(tr.sigma_nn[q] - d.snn) / scale, std::abs(tr.sigma_nt[q] - d.snt) / scale,
                          std::abs(tr.v_n[q] - d.vn), std::abs(tr.v_t[q] - d.vt)});
        const double s = 1.0 + std::abs(tr.sigma_nn[q]) + gamma * (std::abs(tr.v_n[q]) + std::abs(setup.gap[q]));
        worst_id = std::max({worst_id,
                             std::abs(tr.P_n_gamma_g[q] - (tr.sigma_nn[q] - gamma * (tr.v_n[q] - setup.gap[q]))) / s,
                             std::abs(tr.P_n_gamma_0[q] - (tr.sigma_nn[q] - gamma * tr.v_n[q])) / s,
                             std::abs(tr.P_n_gamma_0[q] - tr.P_n_gamma_g[q] + gamma * setup.gap[q]) / s,
                             std::abs(tr.P_tau[q] - (tr.sigma_nt[q] - gamma * tr.v_t[q])) / s});
        ++q;
        ++points;
      }
    }
  }
  CHECK(worst <= 1e-12);
  CHECK(worst_id <= 1e-12);
}
