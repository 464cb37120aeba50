// Small IFS and measure builders shared by the tests.
#pragma once

#include <cstdint>
#include <vector>

#include "selfsim/selfsim.hpp"

namespace fixtures {

using selfsim::IfsSystem;
using selfsim::Similitude;

inline IfsSystem cantor() {
  return IfsSystem("cantor", 1,
                   {Similitude::scaling(1.0 / 3.0, {0.0}), Similitude::scaling(1.0 / 3.0, {2.0 / 3.0})}, true);
}

inline IfsSystem segment() {
  return IfsSystem("segment", 1, {Similitude::scaling(0.5, {0.0}), Similitude::scaling(0.5, {0.5})}, true);
}

inline IfsSystem sierpinski() {
  return IfsSystem("sierpinski", 2,
                   {Similitude::scaling(0.5, {0.0, 0.0}), Similitude::scaling(0.5, {0.5, 0.0}),
                    Similitude::scaling(0.5, {0.25, 0.5})},
                   true);
}

inline IfsSystem mixed() {
  return IfsSystem("mixed", 1, {Similitude::scaling(0.5, {0.0}), Similitude::scaling(0.25, {0.75})}, true);
}

inline IfsSystem single_point() { return IfsSystem("point", 1, {Similitude::scaling(0.5, {0.25})}, true); }

/// Random atomic measure with `atoms` atoms in [0,1]^dim.
inline selfsim::AtomicMeasure random_measure(selfsim::DeterministicRng& rng, std::size_t atoms, std::size_t dim = 1) {
  std::vector<double> coords;
  std::vector<double> masses;
  for (std::size_t i = 0; i < atoms; ++i) {
    for (std::size_t k = 0; k < dim; ++k) coords.push_back(rng.uniform());
    masses.push_back(rng.exponential() + 1e-3);
  }
  double total = 0.0;
  for (double m : masses) total += m;
  for (double& m : masses) m /= total;
  return selfsim::AtomicMeasure::from_atoms(dim, coords, masses);
}

}  // namespace fixtures
