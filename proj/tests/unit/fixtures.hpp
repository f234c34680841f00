#pragma once

#include "crbm/hertz.hpp"

#include <random>

namespace crbm::test {

// Coarse Hertz discretization shared by the tests of one binary.
inline const HertzModel& coarse_model() {
  static const HertzModel m{HertzConfig{}};
  return m;
}

inline const HertzModel& coarse_tresca_model() {
  static const HertzModel m{[] {
    HertzConfig c;
    c.friction = FrictionModel::tresca(0.1);
    return c;
  }()};
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace crbm::test
