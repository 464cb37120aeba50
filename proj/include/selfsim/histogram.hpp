// Dyadic box masses mu(Q), Q = prod [k_i 2^-j, (k_i + 1) 2^-j), and the
// partition sums built from them.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/core.hpp"
#include "selfsim/ifs.hpp"
#include "selfsim/measure.hpp"

namespace selfsim {

inline constexpr int kMaxDyadicLevel = 40;

using BoxKey = std::vector<std::int64_t>;

struct DyadicBox {
  BoxKey key;
  double mass = 0.0;
};

/// Nonempty boxes of one level, sorted by key.
struct DyadicHistogram {
  int level = 0;
  std::size_t dim = 0;
  std::vector<DyadicBox> boxes;

  std::size_t size() const { return boxes.size(); }
  double total_mass() const {
    CompensatedSum acc;
    for (const auto& b : boxes) acc.add(b.mass);
    return acc.value();
  }
};

namespace detail {

inline std::vector<DyadicBox> merge_sorted_boxes(std::vector<std::pair<BoxKey, double>> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<DyadicBox> out;
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    CompensatedSum acc;
    while (j < entries.size() && entries[j].first == entries[i].first) acc.add(entries[j++].second);
    if (acc.value() > 0.0) out.push_back({std::move(entries[i].first), acc.value()});
    i = j;
  }
  return out;
}

}  // namespace detail

/// Bins mu on the level-j dyadic grid. Coordinates must lie in [0, 1] up to
/// kUnitCubeSlack; a coordinate equal to 1 goes to the top box.
inline DyadicHistogram dyadic_histogram(const AtomicMeasure& mu, int level) {
  if (level < 0 || level > kMaxDyadicLevel) {
    throw InputError("dyadic_histogram: level must lie in [0, " + std::to_string(kMaxDyadicLevel) + "]");
  }
  const std::size_t d = mu.dimension();
  const double scale = std::ldexp(1.0, level);
  const auto top = static_cast<std::int64_t>(scale) - 1;
  std::vector<std::pair<BoxKey, double>> entries;
  entries.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto p = mu.point(i);
    BoxKey key(d);
    for (std::size_t c = 0; c < d; ++c) {
      const double x = std::clamp(p[c], 0.0, 1.0);  // absorbs rounding from normalization
      if (!(p[c] >= -kUnitCubeSlack && p[c] <= 1.0 + kUnitCubeSlack)) {
        throw InputError("dyadic_histogram: atom coordinate " + std::to_string(p[c]) +
                         " lies outside [0,1]; normalize the attractor to the unit cube first");
      }
      key[c] = std::min(static_cast<std::int64_t>(std::floor(x * scale)), top);
    }
    entries.emplace_back(std::move(key), mu.mass(i));
  }
  return {level, d, detail::merge_sorted_boxes(std::move(entries))};
}

/// Aggregates boxes into their level j-1 parents.
inline DyadicHistogram coarsen(const DyadicHistogram& h) {
  if (h.level == 0) throw InputError("coarsen: level 0 has no parent level");
  std::vector<std::pair<BoxKey, double>> entries;
  entries.reserve(h.boxes.size());
  for (const auto& b : h.boxes) {
    BoxKey key = b.key;
    for (auto& k : key) k >>= 1;
    entries.emplace_back(std::move(key), b.mass);
  }
  return {h.level - 1, h.dim, detail::merge_sorted_boxes(std::move(entries))};
}

/// Histograms for levels lo..hi (inclusive), binned once at hi and coarsened.
inline std::vector<DyadicHistogram> dyadic_pyramid(const AtomicMeasure& mu, int lo, int hi) {
  if (lo < 0 || hi < lo) throw InputError("dyadic levels: need 0 <= lo <= hi");
  std::vector<DyadicHistogram> out(static_cast<std::size_t>(hi - lo + 1));
  out.back() = dyadic_histogram(mu, hi);
  for (std::size_t k = out.size() - 1; k-- > 0;) out[k] = coarsen(out[k + 1]);
  return out;
}

/// sum_Q mu(Q)^q over nonempty boxes; q = 0 gives the box count.
inline double partition_sum(const DyadicHistogram& h, double q) {
  if (q == 0.0) return static_cast<double>(h.boxes.size());
  CompensatedSum acc;
  for (const auto& b : h.boxes) acc.add(q == 1.0 ? b.mass : std::pow(b.mass, q));
  return acc.value();
}

}  // namespace selfsim
