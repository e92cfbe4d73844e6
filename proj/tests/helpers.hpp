#pragma once

#include <random>

#include "pcf/pcf.hpp"

namespace testing_util {

// Random trig polynomial supported on |z|_inf <= active inside a box of the given cutoff.
inline pcf::FourierField random_field(const pcf::BlochTheta& t, int cutoff, int comps, int active, std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  pcf::FourierField f(t, cutoff, comps);
  for (int c = 0; c < comps; ++c)
    for (int z1 = -active; z1 <= active; ++z1)
      for (int z2 = -active; z2 <= active; ++z2) f.at(z1, z2, c) = {n(rng), n(rng)};
  return f;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing_util
