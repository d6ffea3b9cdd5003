#pragma once

#include <random>

#include "vortex/spectra.hpp"

namespace vortex::test {

/// A valid ring mixture with 2 to 5 rings of distinct wavenumbers.
/// `time_symmetric` pairs every frequency with its negative.
inline Spectrum random_rings(std::mt19937_64& rng, Dimension d, bool time_symmetric = false,
                             double field_variance = 1.0) {
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::uniform_int_distribution<int> count(2, 5);
  RingMixture rm;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const double w = u(rng), k = u(rng), om = u(rng) * (i % 2 ? -0.5 : 1.0);
    if (time_symmetric) {
      rm.rings.push_back({w, k, om});
      rm.rings.push_back({w, k, -om});
    } else {
      rm.rings.push_back({w, k, om});
    }
  }
  return Spectrum(rm, d, field_variance);
}

}  // namespace vortex::test
