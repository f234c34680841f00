#include "crbm/config.hpp"

#include "crbm/errors.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace crbm {

namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CRBM_REAL(KEY, MEMBER)                                                                 \
  Field {                                                                                     \
    KEY, [](RunConfig& c, const std::string& v) { c.MEMBER = to_double(KEY, v); },            \
        [](const RunConfig& c) { return num(c.MEMBER); }                                      \
  }
#define CRBM_INT(KEY, MEMBER)                                                                  \
  Field {                                                                                     \
    KEY, [](RunConfig& c, const std::string& v) { c.MEMBER = static_cast<decltype(c.MEMBER)>(to_int(KEY, v)); }, \
        [](const RunConfig& c) { return std::to_string(c.MEMBER); }                            \
  }
#define CRBM_TEXT(KEY, MEMBER)                                                                 \
  Field {                                                                                     \
    KEY, [](RunConfig& c, const std::string& v) { c.MEMBER = v; },                            \
        [](const RunConfig& c) { return c.MEMBER; }                                            \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      CRBM_REAL("scenario.R2", scenario.R2),
      CRBM_REAL("scenario.g0", scenario.g0),
      CRBM_REAL("scenario.d", scenario.d),
      CRBM_REAL("scenario.mu_min", scenario.mu_min),
      CRBM_REAL("scenario.mu_max", scenario.mu_max),
      Field{"scenario.young",
            [](RunConfig& c, const std::string& v) {
              c.scenario.material =
                  MaterialParams::from_young_poisson(to_double("scenario.young", v), c.scenario.material.poisson_nu);
            },
            [](const RunConfig& c) { return num(c.scenario.material.young_E); }},
      Field{"scenario.poisson",
            [](RunConfig& c, const std::string& v) {
              c.scenario.material =
                  MaterialParams::from_young_poisson(c.scenario.material.young_E, to_double("scenario.poisson", v));
            },
            [](const RunConfig& c) { return num(c.scenario.material.poisson_nu); }},
      CRBM_REAL("scenario.gamma0_factor", scenario.gamma0_factor),
      CRBM_TEXT("scenario.friction", friction),
      CRBM_REAL("scenario.threshold", threshold),
      CRBM_REAL("scenario.coefficient", coefficient),
      CRBM_REAL("scenario.arc_lo", scenario.contact_arc.lo),
      CRBM_REAL("scenario.arc_hi", scenario.contact_arc.hi),
      CRBM_REAL("scenario.char_length", scenario.char_length),
      CRBM_REAL("discretization.h", scenario.h_target),
      CRBM_INT("discretization.degree", scenario.degree),
      CRBM_REAL("discretization.growth", scenario.grading.growth),
      CRBM_REAL("discretization.max_size", scenario.grading.max_size),
      CRBM_REAL("solver.delta_u", solver.delta_u),
      CRBM_INT("solver.max_iter", solver.max_iter),
      CRBM_INT("solver.online_max_iter", online_max_iter),
      CRBM_REAL("solver.delta_fp", coulomb.delta_fp),
      CRBM_INT("solver.max_outer", coulomb.max_outer),
      CRBM_INT("rom.pod_size", pod.size),
      CRBM_REAL("rom.pod_tolerance", pod.tolerance),
      CRBM_REAL("eim.delta", eim.delta),
      CRBM_INT("eim.max_terms", eim.max_terms),
      CRBM_TEXT("sets.train", train),
      CRBM_INT("sets.valid_count", valid_count),
      CRBM_INT("sets.seed", seed),
      CRBM_REAL("sets.valid_restrict", valid_restrict),
      CRBM_INT("sets.rb_min_N", rb_min_N),
      CRBM_INT("sets.rb_step", rb_step),
      CRBM_TEXT("paths.store", store),
      CRBM_TEXT("paths.reports", reports),
  };
  return f;
}

#undef CRBM_REAL
#undef CRBM_INT
#undef CRBM_TEXT

}  // namespace

FrictionModel parse_friction(const std::string& kind, double threshold, double coefficient) {
  try {
    if (kind == "none") return FrictionModel::frictionless();
    if (kind == "tresca") return FrictionModel::tresca(threshold);
    if (kind == "coulomb") return FrictionModel::coulomb(coefficient);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("config: friction must be none, tresca or coulomb, got '" + kind + "'");
}

FrictionModel RunConfig::friction_model() const { return parse_friction(friction, threshold, coefficient); }

HertzConfig RunConfig::hertz() const {
  HertzConfig h = scenario;
  h.friction = friction_model();
  return h;
}

std::vector<double> RunConfig::training_set() const { return parse_grid(train); }

std::vector<double> RunConfig::validation_set() const {
  return uniform_draws(scenario.mu_min, scenario.mu_max, valid_count, seed);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(*this, trim(value));
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

void RunConfig::validate() const {
  hertz().validate();
  if (!(solver.delta_u > 0.0) || solver.max_iter < 1 || online_max_iter < 1) {
    throw ConfigError("config: solver tolerances and iteration caps must be positive");
  }
  if (!(coulomb.delta_fp > 0.0) || coulomb.max_outer < 1) throw ConfigError("config: invalid Coulomb settings");
  if (pod.size < 0 || pod.tolerance < 0.0) throw ConfigError("config: invalid POD target");
  try {
    eim.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const auto t = training_set();
  for (double mu : t) {
    if (!(mu >= scenario.mu_min - 1e-12 && mu <= scenario.mu_max + 1e-12)) {
      throw ConfigError("config: training parameter outside the mu range");
    }
  }
  if (valid_count < 1) throw ConfigError("config: valid_count must be positive");
  if (rb_min_N < 1 || rb_step < 1) throw ConfigError("config: RB sweep settings must be positive");
  if (store.empty() || reports.empty()) throw ConfigError("config: empty path");
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    const std::string key = f.key;
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << key.substr(dot + 1) << " = " << f.get(*this) << '\n';
  }
  return out.str();
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    c.set(section.empty() ? key : section + "." + key, line.substr(eq + 1));
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(f.key);
  return out;
}

}  // namespace crbm
