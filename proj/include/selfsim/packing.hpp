// Greedy packings: maximal separated subfamilies of a point list, packing
// numbers N_r, and the upper box dimension estimate built on them.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfsim/core.hpp"
#include "selfsim/ifs.hpp"

namespace selfsim {

enum class Separation {
  strict,  // kept points pairwise at distance > min_distance
  closed,  // kept points pairwise at distance >= min_distance
};

/// Indices of a maximal separated subfamily, chosen greedily in input order.
///
/// Every rejected point violates the separation against some kept point.
inline std::vector<std::size_t> greedy_separated(std::span<const Point> points, double min_distance,
                                                 Separation rule) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool ok = true;
    for (auto k : kept) {
      const double d = distance(points[i], points[k]);
      if (rule == Separation::strict ? d <= min_distance : d < min_distance) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(i);
  }
  return kept;
}

/// Centers of disjoint radius-r balls: pairwise distance > 2r, greedy in input
/// order. The count is the packing-number proxy.
inline std::vector<Point> packing_centers(std::span<const Point> points, double radius) {
  if (points.empty()) throw InputError("packing_centers: empty point list");
  if (!(radius > 0.0)) throw InputError("packing_centers: radius must be positive");
  std::vector<Point> out;
  for (auto i : greedy_separated(points, 2.0 * radius, Separation::strict)) out.push_back(points[i]);
  return out;
}

struct BoxDimensionEstimate {
  double estimate = 0.0;
  LinearFit fit;
  std::vector<double> radii;
  std::vector<std::size_t> counts;
  double sample_resolution = 0.0;
  std::size_t sample_size = 0;
};

/// Slope of log N_r against -log r, with N_r counted on an attractor sample
/// (cut-set anchors) at least ten times finer than the smallest radius.
inline BoxDimensionEstimate upper_box_dimension(const IfsSystem& ifs, std::span<const double> radii,
                                                std::optional<double> sample_resolution = std::nullopt,
                                                const CutSetOptions& options = {}) {
  if (radii.size() < 2) throw InputError("upper_box_dimension: need at least two radii");
  if (!strictly_decreasing(radii)) throw InputError("upper_box_dimension: radii must be strictly decreasing");
  if (!(radii.back() > 0.0)) throw InputError("upper_box_dimension: radii must be positive");
  const double finest = radii.back() / 10.0;
  const double resolution = sample_resolution.value_or(std::min(1.0, finest));
  if (resolution > finest * (1.0 + 1e-12)) {
    throw InputError("upper_box_dimension: sample resolution " + std::to_string(resolution) +
                     " must be at least 10x finer than the smallest radius " + std::to_string(radii.back()));
  }
  const auto sample = sample_attractor(ifs, resolution, std::nullopt, options);

  BoxDimensionEstimate out;
  out.sample_resolution = resolution;
  out.sample_size = sample.size();
  out.radii.assign(radii.begin(), radii.end());
  std::vector<double> x;
  std::vector<double> y;
  for (double r : radii) {
    const std::size_t n = greedy_separated(sample, 2.0 * r, Separation::strict).size();
    out.counts.push_back(n);
    x.push_back(-std::log(r));
    y.push_back(std::log(static_cast<double>(n)));
  }
  out.fit = least_squares(x, y);
  out.estimate = out.fit.slope;
  return out;
}

}  // namespace selfsim
