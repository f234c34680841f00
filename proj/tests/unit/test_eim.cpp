#include "fixtures.hpp"

#include "crbm/eim.hpp"

#include <cmath>
#include <doctest.h>

#include <random>

using namespace crbm;

namespace {

EimFamily vector_family(const Matrix& members) {
  EimFamily f;
  f.kind = EimKind::Vector;
  for (Eigen::Index i = 0; i < members.rows(); ++i) f.addresses.push_back({static_cast<int>(i), -1});
  f.members = members;
  return f;
}

Vector sample(const EimDecomposition& d, const Vector& m) {
  Vector T(d.size());
  for (int s = 0; s < d.size(); ++s) T[s] = m[d.indices[s]];
  return T;
}

}  // namespace

TEST_CASE("two-member family") {
  Matrix m(3, 2);
  m << 1.0, 0.0,  //
      0.5, 1.0,   //
      0.0, 2.0;
  const auto d = eim_train(vector_family(m), {});
  REQUIRE(d.size() == 2);
  CHECK(d.indices == std::vector<int>{2, 0});
  CHECK(d.reference_norm == 2.0);
  CHECK(d.terms.col(0).isApprox(Vector::Map(std::array<double, 3>{0.0, 0.5, 1.0}.data(), 3)));
  CHECK(d.terms.col(1).isApprox(Vector::Map(std::array<double, 3>{1.0, 0.5, 0.0}.data(), 3)));
  CHECK(d.Q.isIdentity());
  REQUIRE(d.training_log.size() == 3);
  CHECK(d.training_log[0] == 1.0);
  CHECK(d.training_log[1] == 0.5);
  CHECK(d.training_log[2] == 0.0);
  // Leading-block coefficients.
  CHECK(eim_online_coeffs(d, Vector::Constant(1, 4.0))[0] == 4.0);
}

TEST_CASE("single member") {
  Matrix m(4, 1);
  m << 0.1, -3.0, 2.0, 0.0;
  const auto d = eim_train(vector_family(m), {});
  REQUIRE(d.size() == 1);
  CHECK(d.indices[0] == 1);
  CHECK(d.Q(0, 0) == 1.0);
  CHECK(eim_interpolate(d, sample(d, m)).isApprox(m.col(0)));
}

TEST_CASE("ties resolve to the first member and position") {
  Matrix m(3, 3);
  m << 1.0, 1.0, 0.0,  //
      1.0, 0.0, 1.0,   //
      0.0, 1.0, 1.0;
  const auto d = eim_train(vector_family(m), {});
  CHECK(d.indices[0] == 0);
}

TEST_CASE("random low-rank family") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const int n = 200, r = 9, M = 60;
  Matrix U(n, r), C(r, M);
  for (auto& x : U.reshaped()) x = g(rng);
  for (auto& x : C.reshaped()) x = g(rng);
  const Matrix members = U * C;
  const EimConfig cfg{1e-10, 2000};
  const auto d = eim_train(vector_family(members), cfg);
  CHECK(d.size() == r);

  SUBCASE("Q is unit lower-triangular") {
    for (int i = 0; i < d.size(); ++i) {
      CHECK(d.Q(i, i) == 1.0);
      for (int j = i + 1; j < d.size(); ++j) CHECK(d.Q(i, j) == 0.0);
    }
  }
  SUBCASE("interpolation is exact at the selected entries") {
    for (Eigen::Index c = 0; c < M; ++c) {
      const Vector T = sample(d, members.col(c));
      const Vector I = eim_interpolate(d, T);
      for (int s = 0; s < d.size(); ++s) CHECK(std::abs(I[d.indices[s]] - T[s]) <= 1e-12 * T.cwiseAbs().maxCoeff());
    }
  }
  SUBCASE("independent pass confirms the termination tolerance") {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < M; ++c) {
      const Vector I = eim_interpolate(d, sample(d, members.col(c)));
      worst = std::max(worst, (members.col(c) - I).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= cfg.delta * d.reference_norm);
    const auto curve = eim_error_curve(d, members);
    CHECK(curve.size() == d.training_log.size());
    CHECK(std::abs(curve.back() - worst / d.reference_norm) <= 1e-14);
  }
  SUBCASE("zero samples give zero coefficients") {
    CHECK(eim_online_coeffs(d, Vector::Zero(d.size())).isZero(0.0));
  }
  SUBCASE("max_terms caps the expansion") {
    const auto d3 = eim_train(vector_family(members), {1e-10, 3});
    CHECK(d3.size() == 3);
    CHECK(d3.training_log.size() == 4);
  }
}

TEST_CASE("degenerate and invalid families") {
  CHECK_THROWS_AS(eim_train(vector_family(Matrix::Zero(5, 3)), {}), DegenerateFamily);
  CHECK_THROWS_AS(eim_train(vector_family(Matrix(0, 0)), {}), InvalidArgument);
  CHECK_THROWS(EimConfig{-1.0, 10}.validate());
  CHECK_THROWS(EimConfig{1e-6, 0}.validate());
}

TEST_CASE("selected-entry evaluation reproduces full assembly") {
  for (const HertzModel* model : {&test::coarse_model(), &test::coarse_tresca_model()}) {
    const auto& ref = model->reference_space();
    const auto& cfg = model->config();
    const bool tangential = cfg.friction.tangential();
    std::vector<ContactOperator> ops{ContactOperator::Tangent, ContactOperator::ThetaNormal};
    if (tangential) ops.push_back(ContactOperator::ThetaTangential);
    std::vector<std::pair<double, Vector>> states;
    for (double mu : {0.8, 1.1}) {
      const auto inst = model->instance(mu);
      const auto r = solve_nitsche(inst.problem);
      states.emplace_back(mu, r.iterates[1]);
      states.emplace_back(mu, r.U_cv);
    }
    for (auto op : ops) {
      EimFamily f;
      f.kind = op == ContactOperator::Tangent ? EimKind::Matrix : EimKind::Vector;
      f.addresses = contact_addresses(ref, op);
      f.members.resize(f.addresses.size(), states.size());
      for (std::size_t c = 0; c < states.size(); ++c) {
        const auto inst = model->instance(states[c].first);
        f.members.col(c) = contact_member(inst.problem.contact, op, states[c].second);
      }
      const auto d = eim_train(f, {});
      const auto ev = make_entry_evaluator(ref, d, op);
      CHECK(ev.entries.size() == static_cast<std::size_t>(d.size()));
      for (std::size_t c = 0; c < states.size(); ++c) {
        const double mu = states[c].first;
        const auto local = make_local_contact(ref, ev.elements(), model->mapping(mu), cfg.material,
                                              cfg.nitsche().gamma(), cfg.friction, model->gap(mu));
        const Vector sel = evaluate_selected_entries(ev, local, ref, states[c].second);
        for (int s = 0; s < d.size(); ++s) CHECK(sel[s] == f.members(d.indices[s], c));
      }
    }
  }
}
