// crbm: offline/online driver for the reduced Nitsche contact solver.
//
//   crbm [--config FILE] [--<section>.<key> VALUE]... <command> [options]
//
// Exit status: 0 success, 1 usage or configuration error, 2 numerical
// non-convergence.

#include "crbm/workflow.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

using namespace crbm;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNonConvergence = 2;

void log_line(const std::string& s) { std::cerr << "crbm: " << s << '\n'; }

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("expected a comma-separated list of numbers, got '" + s + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

void apply_threads(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("CRBM_THREADS")) n = std::atoi(env);
  }
  if (n > 0) omp_set_num_threads(n);
}

OfflineArtifacts load_store(const RunConfig& cfg) {
  log_line("reading " + cfg.store);
  return from_store(ArtifactStore::read(cfg.store));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-basis solver for Nitsche frictional contact on the Hertz benchmark"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  int threads = 0;
  std::map<std::string, std::string> overrides;
  app.add_option("--config", config_path, "configuration file ([section] key = value)");
  app.add_option("--threads", threads, "worker threads (default: CRBM_THREADS or all cores)");
  for (const auto& key : RunConfig::keys()) {
    app.add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; }, "config key " + key);
  }
  app.add_option_function<std::string>(
      "--friction", [&](const std::string& v) { overrides["scenario.friction"] = v; }, "none, tresca or coulomb");
  app.add_option_function<std::string>(
      "--s", [&](const std::string& v) { overrides["scenario.threshold"] = v; }, "Tresca threshold");
  app.add_option_function<std::string>(
      "--nuF", [&](const std::string& v) { overrides["scenario.coefficient"] = v; }, "Coulomb coefficient");
  app.add_option_function<std::string>(
      "--mesh-size", [&](const std::string& v) { overrides["discretization.h"] = v; }, "mesh size");

  auto* mesh_cmd = app.add_subcommand("mesh", "build the reference mesh and print a summary");
  std::string mesh_out = "mesh.bin";
  mesh_cmd->add_option("--out", mesh_out, "mesh container path");

  auto* hf_cmd = app.add_subcommand("hf-solve", "high-fidelity solve at one parameter");
  double hf_mu = 1.0;
  hf_cmd->add_option("--mu", hf_mu, "parameter value")->required();

  app.add_subcommand("offline", "snapshots, POD, EIM and reduced arrays into the store");

  auto* online_cmd = app.add_subcommand("online", "reduced solve from the store");
  double on_mu = 1.0;
  int on_N = 0;
  online_cmd->add_option("--mu", on_mu, "parameter value")->required();
  online_cmd->add_option("--N", on_N, "reduced dimension (default: all modes)");

  app.add_subcommand("validate", "POD, EIM and RB error curves from the store");

  auto* study_cmd = app.add_subcommand("study", "e_AC convergence table over mu and h");
  std::string study_mu = "0.7,1.0,1.3";
  std::string study_h = "0.005,0.0025";
  study_cmd->add_option("--mus", study_mu, "comma-separated parameter values");
  study_cmd->add_option("--hs", study_h, "comma-separated mesh sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    cfg.validate();
    apply_threads(threads);

    if (*mesh_cmd) {
      const HertzModel model(cfg.hertz());
      const auto& s = model.reference_space();
      ArtifactStore store;
      store.put_bytes("config", cfg.to_text());
      store_mesh(store, s.mesh);
      store.write(mesh_out);
      std::printf("nodes %zu\ntriangles %zu\ncontact_nodes %zu\ncontact_elements %zu\ndofs %d\n",
                  s.mesh.num_nodes(), s.mesh.num_triangles(), s.contact_nodes.size(), s.contact.size(), s.n_dof);
    } else if (*hf_cmd) {
      const auto r = run_hf_solve(cfg, hf_mu);
      write_hf_outputs(cfg, r);
      std::printf("mu %.6g friction %s k_cv %d outer %d e_ac_n %.4e e_ac_nt %.4e\n", r.mu, r.friction.c_str(), r.k_cv,
                  r.outer_iterations, r.e_ac_n, r.e_ac_nt);
    } else if (app.got_subcommand("offline")) {
      const auto a = run_offline(cfg, log_line);
      to_store(a).write(cfg.store);
      std::printf("snapshots %zu rank %d N %d S_b %d S_theta_n %d S_theta_t %d\n", a.snaps.size(), a.basis.rank(),
                  a.basis.size(), a.b.size(), a.theta_n.size(), a.theta_t.size());
    } else if (*online_cmd) {
      const auto a = load_store(cfg);
      const auto m = make_online_model(a);
      const int N = on_N > 0 ? on_N : a.basis.size();
      const auto r = run_online(a, m, on_mu, N);
      write_online_outputs(cfg, r);
      const auto& t = r.solution.timings;
      std::printf("mu %.6g N %d k_cv %d coefficients %.3es reduced_solve %.3es reconstruction %.3es\n", on_mu, N,
                  r.solution.k_cv, t.coefficients, t.reduced_solve, t.reconstruction);
    } else if (app.got_subcommand("validate")) {
      const auto a = load_store(cfg);
      RunConfig rc = a.config;
      rc.reports = cfg.reports;
      const auto rep = run_validate(a, rc, log_line);
      std::printf("validation parameters %zu, RB sizes %zu, reports in %s\n", rep.valid_mus.size(),
                  rep.rb_sizes.size(), rc.reports.c_str());
    } else if (*study_cmd) {
      const auto t = run_study(cfg, parse_list(study_mu), parse_list(study_h));
      write_study(cfg, t);
      for (const auto& c : t.cells) {
        std::printf("mu %.4g h %.4g n_dof %d e_ac %.4e%s\n", c.mu, c.h, c.n_dof, c.e_ac,
                    c.converged ? "" : " (not converged)");
      }
    }
    return kOk;
  } catch (const NonConvergence& e) {
    log_line(std::string("non-convergence: ") + e.what());
    return kNonConvergence;
  } catch (const SingularTangent& e) {
    log_line(std::string("non-convergence: ") + e.what());
    return kNonConvergence;
  } catch (const std::exception& e) {
    log_line(std::string("error: ") + e.what());
    return kUsage;
  }
}
