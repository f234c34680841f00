#pragma once

#include "crbm/eim.hpp"
#include "crbm/hertz.hpp"
#include "crbm/nitsche.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace crbm {

// Flat "section.key = value" settings. Files use [section] headers and '#'
// comments; command-line overrides use the dotted form.
struct RunConfig {
  HertzConfig scenario;  // scenario.friction is derived, see hertz()
  std::string friction = "none";
  double threshold = 0.1;    // Tresca s
  double coefficient = 0.3;  // Coulomb nu_F
  SolverConfig solver;
  int online_max_iter = 200;
  CoulombConfig coulomb;
  PodTarget pod{0, 0.0};  // size 0 and tolerance 0: keep the numerical rank
  EimConfig eim;
  std::string train = "0.7:0.0075:61";
  int valid_count = 30;
  std::uint64_t seed = 20240601;
  double valid_restrict = 1.18;  // RB aggregates use D_valid up to this mu
  int rb_min_N = 10;
  int rb_step = 5;
  std::string store = "crbm_store.bin";
  std::string reports = "reports";

  FrictionModel friction_model() const;
  HertzConfig hertz() const;
  std::vector<double> training_set() const;
  std::vector<double> validation_set() const;

  // Throws ConfigError on unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  // Canonical text form; parse(to_text()) reproduces the configuration.
  std::string to_text() const;
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  static std::vector<std::string> keys();
};

FrictionModel parse_friction(const std::string& kind, double threshold, double coefficient);

}  // namespace crbm
