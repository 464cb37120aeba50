// Finite-depth cascade measures: nested families of separated balls centered
// at cut-set anchors, with mass split uniformly among each ball's children.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "selfsim/core.hpp"
#include "selfsim/ifs.hpp"
#include "selfsim/measure.hpp"
#include "selfsim/packing.hpp"

namespace selfsim {

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

struct CascadeBall {
  Point center;
  Word word;
  double radius = 0.0;
  // Mass is 1 / mass_denominator; integer so the uniform split is exact.
  std::uint64_t mass_denominator = 1;
  std::size_t parent = kNoParent;  // index into the previous level

  double mass() const { return 1.0 / static_cast<double>(mass_denominator); }
};

struct BallFamily {
  int level = 1;                  // p, 1-based
  int resolution_exponent = 0;    // J_{N_p}; cut set I(2^-J)
  double radius = 0.0;            // 2^{-theta J}
  double separation_radius = 0.0; // 2^{-J}; sibling balls of this radius are disjoint
  double gather_radius = 0.0;     // r_{p-1} used to collect candidates (0 at level 1)
  std::vector<CascadeBall> balls;
  // Per parent in the previous level (a single entry at level 1).
  std::vector<std::size_t> candidate_pool_sizes;
  std::vector<std::size_t> child_counts;
  bool growth_condition = true;   // J_p > max(p theta J_{p-1}, e^{J_{p-1}}) at this level
};

struct CascadeTree {
  double theta = 1.0;
  std::vector<int> levels;  // J_{N_1} < J_{N_2} < ...
  double diameter = 0.0;    // |K| bound used in the gather radii
  std::vector<BallFamily> families;

  std::size_t depth() const { return families.size(); }
  const BallFamily& family(std::size_t level) const {
    if (level < 1 || level > families.size()) {
      throw InputError("cascade: level " + std::to_string(level) + " outside 1.." + std::to_string(families.size()));
    }
    return families[level - 1];
  }
};

struct CascadeOptions {
  CutSetOptions cut;
  std::optional<Point> base;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// J_1, ceil(g theta J_1), ceil(g theta J_2), ...
inline std::vector<int> geometric_level_schedule(int first, double theta, std::size_t depth, double growth = 2.0) {
  if (first < 1) throw InputError("level schedule: first level must be >= 1");
  if (!(theta >= 1.0)) throw InputError("level schedule: theta must be >= 1");
  std::vector<int> out{first};
  while (out.size() < depth) {
    out.push_back(static_cast<int>(std::ceil(growth * theta * out.back() - 1e-9)));
  }
  return out;
}

namespace detail {

struct LevelCells {
  CutSet cut;
  std::vector<Point> anchors;
  std::vector<BoundingBox> boxes;        // S_w(box K) outer box of each cell
  std::vector<std::size_t> by_low_edge;  // cell indices sorted by boxes[i].lo[0]
  double max_width = 0.0;
};

inline LevelCells make_level_cells(const IfsSystem& ifs, int exponent, const BoundingBox& hull,
                                   std::span<const double> base, const CutSetOptions& options) {
  LevelCells cells;
  cells.cut = cut_set(ifs, std::exp2(-static_cast<double>(exponent)), options);
  cells.anchors.reserve(cells.cut.size());
  cells.boxes.reserve(cells.cut.size());
  for (const auto& w : cells.cut.words) {
    const Similitude map = compose_word(ifs, w);
    cells.anchors.push_back(map.apply(base));
    cells.boxes.push_back(image_box(map, hull));
    cells.max_width = std::max(cells.max_width, cells.boxes.back().hi[0] - cells.boxes.back().lo[0]);
  }
  cells.by_low_edge.resize(cells.cut.size());
  std::iota(cells.by_low_edge.begin(), cells.by_low_edge.end(), std::size_t{0});
  std::stable_sort(cells.by_low_edge.begin(), cells.by_low_edge.end(),
                   [&](std::size_t a, std::size_t b) { return cells.boxes[a].lo[0] < cells.boxes[b].lo[0]; });
  return cells;
}

inline double box_distance(const BoundingBox& box, std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double gap = std::max({box.lo[i] - x[i], 0.0, x[i] - box.hi[i]});
    acc += gap * gap;
  }
  return std::sqrt(acc);
}

/// Cells whose outer box meets the open ball B(x, r), in cut-set order. This
/// contains every cell K_w that meets the ball.
inline std::vector<std::size_t> cells_meeting_ball(const LevelCells& cells, std::span<const double> x, double r) {
  const double lo = x[0] - r - cells.max_width;
  const double hi = x[0] + r;
  auto first = std::lower_bound(cells.by_low_edge.begin(), cells.by_low_edge.end(), lo,
                                [&](std::size_t i, double v) { return cells.boxes[i].lo[0] < v; });
  std::vector<std::size_t> out;
  for (auto it = first; it != cells.by_low_edge.end() && cells.boxes[*it].lo[0] < hi; ++it) {
    if (box_distance(cells.boxes[*it], x) < r) out.push_back(*it);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::uint64_t checked_multiply(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b) {
    throw ConstructionError("cascade: mass denominator overflows 64 bits");
  }
  return a * b;
}

}  // namespace detail

/// Builds levels 1..depth of the cascade.
///
/// Level 1 is a greedy maximal family of anchors of I(2^-J_1) whose
/// 2^-J_1-balls are disjoint; each gets mass 1/Delta_1. For each ball at
/// level p, the children are a greedy maximal 2^-J_{p+1}-disjoint family among
/// the cells of I(2^-J_{p+1}) meeting B(x, r_p), r_p = 2^{-theta J_p} - |K| 2^{-J_{p+1}},
/// and share the parent's mass equally.
inline CascadeTree build_cascade(const IfsSystem& ifs, double theta, std::span<const int> levels, std::size_t depth,
                                 const CascadeOptions& options = {}) {
  if (!(theta >= 1.0)) throw InputError("build_cascade: theta must be >= 1");
  if (depth < 1) throw InputError("build_cascade: depth must be >= 1");
  if (levels.size() < depth) {
    throw InputError("build_cascade: " + std::to_string(levels.size()) + " levels given for depth " +
                     std::to_string(depth));
  }
  for (std::size_t p = 0; p < depth; ++p) {
    if (levels[p] < 0) throw InputError("build_cascade: levels must be non-negative");
    if (p > 0 && !(levels[p] > levels[p - 1])) throw InputError("build_cascade: levels must strictly increase");
  }

  const BoundingBox hull = attractor_bounding_box(ifs);
  CascadeTree tree;
  tree.theta = theta;
  tree.levels.assign(levels.begin(), levels.begin() + static_cast<std::ptrdiff_t>(depth));
  tree.diameter = hull.diameter();
  const Point base = options.base ? *options.base : default_base(ifs);

  // Validate the whole schedule before doing any enumeration.
  for (std::size_t p = 0; p + 1 < depth; ++p) {
    const double outer = std::exp2(-theta * levels[p]);
    const double gather = outer - tree.diameter * std::exp2(-static_cast<double>(levels[p + 1]));
    const std::string pair = "levels " + std::to_string(p + 1) + "->" + std::to_string(p + 2) + " (J=" +
                             std::to_string(levels[p]) + "->" + std::to_string(levels[p + 1]) + ")";
    if (!(gather > 0.0)) throw ScheduleError("build_cascade: r_p <= 0 at " + pair);
    if (gather < 0.5 * outer) {
      throw ScheduleError("build_cascade: r_p below half of 2^{-theta J_p} at " + pair +
                          "; the next level is not fine enough");
    }
  }

  // Level 1.
  {
    const int exponent = levels[0];
    const auto cells = detail::make_level_cells(ifs, exponent, hull, base, options.cut);
    BallFamily family;
    family.level = 1;
    family.resolution_exponent = exponent;
    family.radius = std::exp2(-theta * exponent);
    family.separation_radius = std::exp2(-static_cast<double>(exponent));
    const auto kept = greedy_separated(cells.anchors, 2.0 * family.separation_radius, Separation::closed);
    family.candidate_pool_sizes = {cells.cut.size()};
    family.child_counts = {kept.size()};
    for (auto i : kept) {
      family.balls.push_back({cells.anchors[i], cells.cut.words[i], family.radius,
                              static_cast<std::uint64_t>(kept.size()), kNoParent});
    }
    tree.families.push_back(std::move(family));
  }

  for (std::size_t p = 1; p < depth; ++p) {
    const BallFamily& parent_family = tree.families.back();
    const int exponent = levels[p];
    const auto cells = detail::make_level_cells(ifs, exponent, hull, base, options.cut);

    BallFamily family;
    family.level = static_cast<int>(p + 1);
    family.resolution_exponent = exponent;
    family.radius = std::exp2(-theta * exponent);
    family.separation_radius = std::exp2(-static_cast<double>(exponent));
    family.gather_radius = parent_family.radius - tree.diameter * family.separation_radius;
    const double prev = static_cast<double>(levels[p - 1]);
    family.growth_condition =
        exponent > std::max(static_cast<double>(p + 1) * theta * prev, std::exp(prev));

    const std::size_t parents = parent_family.balls.size();
    std::vector<std::vector<std::size_t>> selected(parents);
    std::vector<std::size_t> pool_sizes(parents);

    auto process = [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const auto pool = detail::cells_meeting_ball(cells, parent_family.balls[k].center, family.gather_radius);
        pool_sizes[k] = pool.size();
        std::vector<Point> centers;
        centers.reserve(pool.size());
        for (auto c : pool) centers.push_back(cells.anchors[c]);
        for (auto i : greedy_separated(centers, 2.0 * family.separation_radius, Separation::closed)) {
          selected[k].push_back(pool[i]);
        }
      }
    };
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, parents / 64)));
    if (threads <= 1) {
      process(0, parents);
    } else {
      std::vector<std::thread> workers;
      const std::size_t chunk = (parents + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(parents, t * chunk);
        const std::size_t end = std::min(parents, begin + chunk);
        workers.emplace_back(process, begin, end);
      }
      for (auto& w : workers) w.join();
    }

    family.candidate_pool_sizes = pool_sizes;
    for (std::size_t k = 0; k < parents; ++k) {
      const auto& parent = parent_family.balls[k];
      if (selected[k].empty()) {
        throw ConstructionError("build_cascade: ball " + parent.word.to_string() + " at level " +
                                std::to_string(p) + " has no children");
      }
      family.child_counts.push_back(selected[k].size());
      const std::uint64_t den = detail::checked_multiply(parent.mass_denominator, selected[k].size());
      for (auto c : selected[k]) {
        family.balls.push_back({cells.anchors[c], cells.cut.words[c], family.radius, den, k});
      }
    }
    tree.families.push_back(std::move(family));
  }
  return tree;
}

/// One atom per ball of the given level, at its center with its mass.
inline AtomicMeasure cascade_to_atomic(const CascadeTree& tree, std::size_t level) {
  const BallFamily& family = tree.family(level);
  if (family.balls.empty()) throw InternalError("cascade_to_atomic: empty level");
  const std::size_t d = family.balls.front().center.size();
  std::vector<double> coords;
  std::vector<double> masses;
  coords.reserve(family.balls.size() * d);
  for (const auto& b : family.balls) {
    coords.insert(coords.end(), b.center.begin(), b.center.end());
    masses.push_back(b.mass());
  }
  return AtomicMeasure::from_atoms(d, std::move(coords), std::move(masses));
}

}  // namespace selfsim
