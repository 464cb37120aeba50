// Finitely supported probability measures and the measure families built on
// self-similar sets: natural approximants, mixtures, random references.
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
#include <utility>
#include <vector>

#include "selfsim/core.hpp"
#include "selfsim/ifs.hpp"

namespace selfsim {

inline constexpr double kMassInputTolerance = 1e-9;

/// Probability measure sum_k m_k delta_{x_k} with distinct points, stored as
/// flat coordinate rows sorted lexicographically.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;

  /// Validates, merges coincident atoms and drops zero masses. Total mass must
  /// be 1 within 1e-9; it is renormalized so the stored total is 1 to rounding.
  static AtomicMeasure from_atoms(std::size_t dim, std::vector<double> coords, std::vector<double> masses) {
    if (dim == 0) throw InputError("measure: dimension must be positive");
    if (coords.size() != dim * masses.size()) throw InputError("measure: coordinate count mismatch");
    if (masses.empty()) throw InputError("measure: no atoms");
    for (double m : masses) {
      if (!(m >= 0.0) || !std::isfinite(m)) throw InputError("measure: masses must be finite and >= 0");
    }
    for (double c : coords) {
      if (!std::isfinite(c)) throw InputError("measure: non-finite coordinate");
    }

    std::vector<std::size_t> order(masses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto row = [&](std::size_t i) { return std::span<const double>(coords.data() + i * dim, dim); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto ra = row(a);
      const auto rb = row(b);
      return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });

    AtomicMeasure out;
    out.dim_ = dim;
    for (std::size_t k = 0; k < order.size();) {
      const auto r = row(order[k]);
      CompensatedSum mass;
      std::size_t j = k;
      while (j < order.size() && std::ranges::equal(row(order[j]), r)) mass.add(masses[order[j++]]);
      if (mass.value() > 0.0) {
        out.coords_.insert(out.coords_.end(), r.begin(), r.end());
        out.masses_.push_back(mass.value());
      }
      k = j;
    }
    if (out.masses_.empty()) throw InputError("measure: all masses are zero");
    const double total = compensated_sum(out.masses_);
    if (std::abs(total - 1.0) > kMassInputTolerance) {
      throw InputError("measure: total mass " + std::to_string(total) + " is not 1");
    }
    if (std::abs(total - 1.0) > 1e-14) {
      for (double& m : out.masses_) m /= total;
    }
    return out;
  }

  static AtomicMeasure dirac(std::span<const double> point) {
    return from_atoms(point.size(), std::vector<double>(point.begin(), point.end()), {1.0});
  }

  /// Equal masses on the given points (duplicates merge).
  static AtomicMeasure uniform(std::span<const Point> points) {
    if (points.empty()) throw InputError("measure: no atoms");
    const std::size_t d = points.front().size();
    std::vector<double> coords;
    coords.reserve(points.size() * d);
    for (const auto& p : points) {
      if (p.size() != d) throw InputError("measure: mixed dimensions");
      coords.insert(coords.end(), p.begin(), p.end());
    }
    return from_atoms(d, std::move(coords), std::vector<double>(points.size(), 1.0 / static_cast<double>(points.size())));
  }

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return masses_.size(); }
  bool empty() const { return masses_.empty(); }

  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  double mass(std::size_t i) const { return masses_[i]; }
  const std::vector<double>& coords() const { return coords_; }
  const std::vector<double>& masses() const { return masses_; }
  double total_mass() const { return compensated_sum(masses_); }

  friend bool operator==(const AtomicMeasure&, const AtomicMeasure&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> masses_;
};

/// weight * mu + (1 - weight) * nu on the merged support.
inline AtomicMeasure mixture(double weight, const AtomicMeasure& mu, const AtomicMeasure& nu) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw InputError("mixture: weight must lie in [0,1], got " + std::to_string(weight));
  }
  if (mu.dimension() != nu.dimension()) throw InputError("mixture: dimension mismatch");
  if (weight == 0.0) return nu;
  if (weight == 1.0) return mu;
  std::vector<double> coords = mu.coords();
  coords.insert(coords.end(), nu.coords().begin(), nu.coords().end());
  std::vector<double> masses;
  masses.reserve(mu.size() + nu.size());
  for (double m : mu.masses()) masses.push_back(weight * m);
  for (double m : nu.masses()) masses.push_back((1.0 - weight) * m);
  return AtomicMeasure::from_atoms(mu.dimension(), std::move(coords), std::move(masses));
}

/// Closed-ball mass: atoms with |x - center| <= radius count.
inline double ball_mass(const AtomicMeasure& mu, std::span<const double> center, double radius) {
  if (!(radius > 0.0)) throw InputError("ball_mass: radius must be positive");
  if (center.size() != mu.dimension()) throw InputError("ball_mass: dimension mismatch");
  CompensatedSum acc;
  if (mu.dimension() == 1) {
    // Atoms are sorted, so the ball is a contiguous run.
    const auto& c = mu.coords();
    // Start slightly early so rounding in center - radius cannot skip a boundary atom.
    auto it = std::lower_bound(c.begin(), c.end(), center[0] - radius * (1.0 + 1e-12) - 1e-300);
    for (; it != c.end() && *it - center[0] <= radius; ++it) {
      if (std::abs(*it - center[0]) <= radius) acc.add(mu.mass(static_cast<std::size_t>(it - c.begin())));
    }
    return acc.value();
  }
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (squared_distance(mu.point(i), center) <= r2) acc.add(mu.mass(i));
  }
  return acc.value();
}

/// Smallest distance between two distinct atoms; +inf for a single atom.
inline double min_atom_spacing(const AtomicMeasure& mu) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = mu.size();
  // Atoms are sorted by first coordinate; prune on it.
  for (std::size_t i = 0; i < n; ++i) {
    const auto pi = mu.point(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto pj = mu.point(j);
      if (pj[0] - pi[0] >= best) break;
      best = std::min(best, distance(pi, pj));
    }
  }
  return best;
}

/// lambda_R = sum_{w in I(R)} a_w^s delta_{S_w(base)}.
inline AtomicMeasure natural_measure(const IfsSystem& ifs, double resolution,
                                     std::optional<Point> base = std::nullopt,
                                     const CutSetOptions& options = {}) {
  const double s = similarity_dimension(ifs);
  const CutSet cut = cut_set(ifs, resolution, options);
  const Point b = base ? *base : default_base(ifs);
  std::vector<double> coords;
  coords.reserve(cut.size() * ifs.dimension());
  std::vector<double> masses;
  masses.reserve(cut.size());
  for (const auto& w : cut.words) {
    const Point x = anchor_point(ifs, w, b);
    coords.insert(coords.end(), x.begin(), x.end());
    masses.push_back(std::exp(s * w.log_ratio));
  }
  return AtomicMeasure::from_atoms(ifs.dimension(), std::move(coords), std::move(masses));
}

/// True iff some anchor lies within the closed ball of radius 2^{-theta J} around x.
inline bool lambda_theta_membership(std::span<const double> x, std::span<const Point> anchors,
                                    double theta, int level) {
  const double radius = std::exp2(-theta * static_cast<double>(level));
  return std::any_of(anchors.begin(), anchors.end(),
                     [&](const Point& a) { return distance(a, x) <= radius; });
}

/// Portable seeded generator: splitmix64-seeded xoshiro256**.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& s : state_) s = splitmix(z);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  double exponential() { return -std::log1p(-uniform()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  static std::uint64_t splitmix(std::uint64_t& z) {
    std::uint64_t r = (z += 0x9e3779b97f4a7c15ULL);
    r = (r ^ (r >> 30)) * 0xbf58476d1ce4e5b9ULL;
    r = (r ^ (r >> 27)) * 0x94d049bb133111ebULL;
    return r ^ (r >> 31);
  }
  std::uint64_t state_[4]{};
};

/// Seeded stand-in for a dense sequence in M(K): `size` anchors of uniformly
/// random words of length `depth`, with flat-Dirichlet masses.
inline AtomicMeasure random_reference_measure(const IfsSystem& ifs, std::size_t size, std::uint64_t seed,
                                              std::size_t depth = 8) {
  if (size == 0) throw InputError("random_reference_measure: size must be >= 1");
  DeterministicRng rng(seed);
  const Point base = default_base(ifs);
  std::vector<double> coords;
  coords.reserve(size * ifs.dimension());
  std::vector<double> weights(size);
  for (std::size_t k = 0; k < size; ++k) {
    Word w;
    for (std::size_t i = 0; i < depth; ++i) w = ifs.extend(w, static_cast<std::uint32_t>(rng.below(ifs.size())));
    const Point x = anchor_point(ifs, w, base);
    coords.insert(coords.end(), x.begin(), x.end());
  }
  for (auto& w : weights) w = rng.exponential() + 1e-300;
  const double total = compensated_sum(weights);
  for (auto& w : weights) w /= total;
  return AtomicMeasure::from_atoms(ifs.dimension(), std::move(coords), std::move(weights));
}

}  // namespace selfsim
