#include "fixtures.hpp"

#include "crbm/csv.hpp"
#include "crbm/workflow.hpp"

#include <doctest.h>

#include <filesystem>

using namespace crbm;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.train = "0.8:0.1:5";
  c.valid_count = 4;
  c.rb_min_N = 2;
  c.rb_step = 2;
  return c;
}

const OfflineArtifacts& small_offline() {
  static const OfflineArtifacts a = run_offline(small_config());
  return a;
}

}  // namespace

TEST_CASE("mesh sections round trip") {
  const Mesh& m = test::coarse_model().reference_space().mesh;
  ArtifactStore s;
  store_mesh(s, m);
  const Mesh r = load_mesh(ArtifactStore::deserialize(s.serialize()));
  CHECK(r.nodes == m.nodes);
  CHECK(r.triangles == m.triangles);
  REQUIRE(r.boundary_edges.size() == m.boundary_edges.size());
  for (std::size_t i = 0; i < m.boundary_edges.size(); ++i) {
    CHECK(r.boundary_edges[i].nodes == m.boundary_edges[i].nodes);
    CHECK(r.boundary_edges[i].tag == m.boundary_edges[i].tag);
  }
  CHECK(r.mesh_size_h == m.mesh_size_h);
  CHECK(r.arc_center == m.arc_center);
}

TEST_CASE("offline artifacts") {
  const auto& a = small_offline();
  CHECK(a.snaps.size() == 5);
  CHECK(a.basis.size() == 5);
  CHECK(a.b.size() > 0);
  CHECK(a.theta_n.size() > 0);
  CHECK(a.theta_t.size() == 0);
  for (int k : a.k_cv) CHECK(k > 0);
}

TEST_CASE("store round trip gives the same online solution") {
  const auto& a = small_offline();
  const auto bytes = to_store(a).serialize();
  const auto b = from_store(ArtifactStore::deserialize(bytes));
  CHECK(to_store(b).serialize() == bytes);

  const auto ma = make_online_model(a);
  const auto mb = make_online_model(b);
  SolverConfig sc;
  sc.max_iter = 200;
  const auto ra = solve_reduced_eim(ma, 0.95, 4, sc);
  const auto rb = solve_reduced_eim(mb, 0.95, 4, sc);
  CHECK(ra.coeffs == rb.coeffs);
  CHECK(ra.U == rb.U);

  // Stored pieces equal a fresh reduction from the basis.
  const auto fresh = make_online_model(*b.model, b.config.friction_model(), b.basis, b.b, b.theta_n, b.theta_t);
  CHECK(fresh.ops.K == mb.ops.K);
  CHECK(fresh.rb.vectors == mb.rb.vectors);
  CHECK(fresh.elements == mb.elements);
}

TEST_CASE("offline is deterministic") {
  const auto again = run_offline(small_config());
  CHECK(to_store(again).serialize() == to_store(small_offline()).serialize());
}

TEST_CASE("online reproduces a training snapshot") {
  const auto& a = small_offline();
  const auto m = make_online_model(a);
  const auto r = run_online(a, m, 1.0, a.basis.size());
  CHECK(r.solution.converged);
  CHECK(r.e_snapshot >= 0.0);
  CHECK(r.e_snapshot <= 1e-5);
  CHECK(run_online(a, m, 0.95, 3).e_snapshot == -1.0);
}

TEST_CASE("Tresca offline adds a small tangential residual decomposition") {
  RunConfig c = small_config();
  c.friction = "tresca";
  const auto a = run_offline(c);
  CHECK(a.theta_t.size() >= 1);
  CHECK(a.theta_t.size() <= 10);
  CHECK(a.rt.vectors.cols() == a.theta_t.size());
  const auto store = to_store(a);
  CHECK(store.has("eim.theta_t.Q"));
  const auto b = from_store(store);
  CHECK(b.theta_t.indices == a.theta_t.indices);
}

TEST_CASE("Coulomb has no offline stage") {
  RunConfig c = small_config();
  c.friction = "coulomb";
  CHECK_THROWS_AS(run_offline(c), NotApplicable);
}

TEST_CASE("validation reports") {
  const auto dir = (std::filesystem::temp_directory_path() / "crbm_test_reports").string();
  std::filesystem::remove_all(dir);
  RunConfig c = small_offline().config;
  c.reports = dir;
  const auto rep = run_validate(small_offline(), c);
  for (const char* f : {"pod.csv", "pod.svg", "eim_b.csv", "eim_theta_n.csv", "rb.csv", "rb_detail.csv", "hf_valid.csv",
                        "rb.svg"}) {
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / f));
  }
  const auto pod = read_csv(dir + "/pod.csv");
  CHECK(pod.schema == "pod_error");
  CHECK(pod.columns[0] == "N");
  CHECK(pod.columns[1] == "e_pod");
  const auto rb = read_csv(dir + "/rb.csv");
  CHECK(std::stoi(rb.rows.front()[0]) == c.rb_min_N);
  CHECK(rep.eim_valid[0].size() == rep.eim_train[0].size());
  std::filesystem::remove_all(dir);
}
