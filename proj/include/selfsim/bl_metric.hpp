// Bounded-Lipschitz distance between atomic measures:
//
//   rho(mu, nu) = sup { |int f dmu - int f dnu| : |f| <= 1, Lip(f) <= 1 }.
//
// On a finite support this is a linear program in the values f_k. Adding a
// ground node at distance 1 from every atom turns the constraint |f_k| <= 1
// into an ordinary Lipschitz constraint, so the LP is the dual of a
// transportation problem with ground cost min(|x - y|, 2). We solve that
// transportation problem and read an optimal f off its potentials.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/core.hpp"
#include "selfsim/measure.hpp"
#include "selfsim/transport.hpp"

namespace selfsim {

inline constexpr std::size_t kDefaultSupportCap = 2000;
inline constexpr double kDualityTolerance = 1e-9;

/// Values of a bounded 1-Lipschitz function on a finite support. Off the
/// support it is extended by McShane's formula and clipped to [-1, 1].
struct LipschitzWitness {
  std::size_t dim = 0;
  std::vector<double> support;  // flat rows
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::span<const double> point(std::size_t i) const { return {support.data() + i * dim, dim}; }

  double operator()(std::span<const double> x) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < values.size(); ++k) best = std::min(best, values[k] + distance(point(k), x));
    return std::clamp(best, -1.0, 1.0);
  }

  /// Worst violation of |f| <= 1 and |f_a - f_b| <= |x_a - x_b| over the support.
  double max_violation() const {
    double worst = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a) {
      worst = std::max(worst, std::abs(values[a]) - 1.0);
      for (std::size_t b = a + 1; b < values.size(); ++b) {
        worst = std::max(worst, std::abs(values[a] - values[b]) - distance(point(a), point(b)));
      }
    }
    return worst;
  }

  bool admissible(double tol = kDualityTolerance) const { return max_violation() <= tol; }
};

struct BlDistance {
  double value = 0.0;
  LipschitzWitness witness;
  double witness_value = 0.0;  // sum_k (mu_k - nu_k) f_k for the returned witness
};

/// Union of the two supports with the signed weights mu - nu.
struct SignedSupport {
  std::size_t dim = 0;
  std::vector<double> coords;
  std::vector<double> weights;
};

inline SignedSupport signed_difference(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  if (mu.dimension() != nu.dimension()) throw InputError("bl_distance: dimension mismatch");
  SignedSupport out;
  out.dim = mu.dimension();
  std::size_t i = 0;
  std::size_t j = 0;
  auto push = [&](std::span<const double> p, double w) {
    out.coords.insert(out.coords.end(), p.begin(), p.end());
    out.weights.push_back(w);
  };
  while (i < mu.size() || j < nu.size()) {
    if (j == nu.size()) {
      push(mu.point(i), mu.mass(i));
      ++i;
    } else if (i == mu.size()) {
      push(nu.point(j), -nu.mass(j));
      ++j;
    } else {
      const auto a = mu.point(i);
      const auto b = nu.point(j);
      if (std::ranges::equal(a, b)) {
        push(a, mu.mass(i) - nu.mass(j));
        ++i;
        ++j;
      } else if (std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end())) {
        push(a, mu.mass(i));
        ++i;
      } else {
        push(b, -nu.mass(j));
        ++j;
      }
    }
  }
  return out;
}

inline double bl_ground_cost(std::span<const double> a, std::span<const double> b) {
  return std::min(distance(a, b), 2.0);
}

inline void require_normalized(const AtomicMeasure& m, const char* name) {
  if (m.empty()) throw InputError(std::string("bl_distance: ") + name + " is empty");
  if (std::abs(m.total_mass() - 1.0) > 1e-12) {
    throw InputError(std::string("bl_distance: ") + name + " is not a probability measure");
  }
}

/// Exact rho(mu, nu) with an optimal witness.
inline BlDistance bl_distance(const AtomicMeasure& mu, const AtomicMeasure& nu,
                              std::size_t support_cap = kDefaultSupportCap) {
  require_normalized(mu, "mu");
  require_normalized(nu, "nu");
  const SignedSupport diff = signed_difference(mu, nu);
  const std::size_t m = diff.weights.size();
  if (m > support_cap) {
    throw ResourceError("bl_distance: combined support " + std::to_string(m) + " exceeds cap " +
                        std::to_string(support_cap));
  }
  auto point = [&](std::size_t k) { return std::span<const double>(diff.coords.data() + k * diff.dim, diff.dim); };

  std::vector<std::size_t> sources;
  std::vector<std::size_t> sinks;
  for (std::size_t k = 0; k < m; ++k) {
    if (diff.weights[k] > 0.0) sources.push_back(k);
    if (diff.weights[k] < 0.0) sinks.push_back(k);
  }

  BlDistance out;
  out.witness.dim = diff.dim;
  out.witness.support = diff.coords;
  out.witness.values.assign(m, 0.0);
  if (sources.empty() || sinks.empty()) return out;

  std::vector<double> supply;
  std::vector<double> demand;
  for (auto k : sources) supply.push_back(diff.weights[k]);
  for (auto k : sinks) demand.push_back(-diff.weights[k]);
  std::vector<double> cost(sources.size() * sinks.size());
  for (std::size_t a = 0; a < sources.size(); ++a) {
    for (std::size_t b = 0; b < sinks.size(); ++b) {
      cost[a * sinks.size() + b] = bl_ground_cost(point(sources[a]), point(sinks[b]));
    }
  }
  const TransportSolution sol = solve_transport(supply, demand, cost);
  out.value = sol.cost;

  // f = -potential on sinks; extend to the whole support by the c-transform
  // g(x) = min_t (f_t + c(x, t)), which is c-Lipschitz and no worse than the
  // transport dual. c <= 2 bounds the oscillation, so centering gives |g| <= 1.
  auto& g = out.witness.values;
  for (std::size_t k = 0; k < m; ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < sinks.size(); ++b) {
      best = std::min(best, -sol.sink_potential[b] + bl_ground_cost(point(k), point(sinks[b])));
    }
    g[k] = best;
  }
  const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
  const double shift = 0.5 * (*lo + *hi);
  for (double& v : g) v = std::clamp(v - shift, -1.0, 1.0);

  CompensatedSum acc;
  for (std::size_t k = 0; k < m; ++k) acc.add(diff.weights[k] * g[k]);
  out.witness_value = acc.value();
  return out;
}

/// Equals `height` on the closed inner ball, 0 outside the outer ball, and is
/// linear in |y - center| in between.
struct TentFunction {
  Point center;
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  double height = 0.0;

  /// Tent with plateau radius d/2, support radius d and height c.
  static TentFunction from_schedule(Point center, double c, double d) {
    return TentFunction{std::move(center), d / 2.0, d, c};
  }

  double slope() const { return height / (outer_radius - inner_radius); }
  bool admissible() const { return std::abs(height) <= 1.0 && slope() <= 1.0; }

  /// Largest factor in (0, 1] making the tent bounded by 1 with slope <= 1.
  double admissible_scale() const {
    double scale = 1.0;
    if (std::abs(height) > 1.0) scale = std::min(scale, 1.0 / std::abs(height));
    if (slope() > 1.0) scale = std::min(scale, 1.0 / slope());
    return scale;
  }

  TentFunction scaled(double factor) const { return TentFunction{center, inner_radius, outer_radius, height * factor}; }
};

inline double tent_eval(const TentFunction& tent, std::span<const double> y) {
  if (!(tent.inner_radius > 0.0 && tent.inner_radius < tent.outer_radius)) {
    throw InputError("tent: need 0 < inner radius < outer radius");
  }
  const double r = distance(tent.center, y);
  if (r <= tent.inner_radius) return tent.height;
  if (r >= tent.outer_radius) return 0.0;
  return tent.height * (tent.outer_radius - r) / (tent.outer_radius - tent.inner_radius);
}

struct DualityCheck {
  bool holds = false;
  double lhs = 0.0;    // |int f dmu - int f dnu|
  double rho = 0.0;
  double scale = 1.0;  // rescaling applied to a tent (1 if none)
};

template <typename F>
double integrate(const F& f, const AtomicMeasure& mu) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < mu.size(); ++i) acc.add(mu.mass(i) * f(mu.point(i)));
  return acc.value();
}

/// |int f dmu - int f dnu| <= rho + 1e-9 for an admissible witness.
inline DualityCheck duality_check(const LipschitzWitness& f, const AtomicMeasure& mu, const AtomicMeasure& nu,
                                  double rho) {
  if (!f.admissible()) throw InputError("duality_check: witness is not bounded 1-Lipschitz on its support");
  DualityCheck out;
  out.rho = rho;
  out.lhs = std::abs(integrate(f, mu) - integrate(f, nu));
  out.holds = out.lhs <= rho + kDualityTolerance;
  return out;
}

/// Same check for a tent. An inadmissible tent is rescaled by
/// admissible_scale() when `allow_rescale`, and rejected otherwise.
inline DualityCheck duality_check(const TentFunction& tent, const AtomicMeasure& mu, const AtomicMeasure& nu,
                                  double rho, bool allow_rescale = true) {
  DualityCheck out;
  out.rho = rho;
  out.scale = tent.admissible() ? 1.0 : tent.admissible_scale();
  if (out.scale < 1.0 && !allow_rescale) {
    throw InputError("duality_check: tent slope " + std::to_string(tent.slope()) + " or height exceeds 1");
  }
  const TentFunction used = tent.scaled(out.scale);
  auto f = [&](std::span<const double> y) { return tent_eval(used, y); };
  out.lhs = std::abs(integrate(f, mu) - integrate(f, nu));
  out.holds = out.lhs <= rho + kDualityTolerance;
  return out;
}

struct GdeltaEntry {
  std::size_t index = 0;
  double distance = 0.0;
  double radius = 0.0;
  bool inside = false;  // distance < radius
};

/// rho(mu, mu_k) against each approximating ball radius.
inline std::vector<GdeltaEntry> gdelta_trace(const AtomicMeasure& mu,
                                             std::span<const std::pair<AtomicMeasure, double>> approximants,
                                             std::size_t support_cap = kDefaultSupportCap) {
  std::vector<GdeltaEntry> out;
  out.reserve(approximants.size());
  for (std::size_t k = 0; k < approximants.size(); ++k) {
    const auto& [mk, radius] = approximants[k];
    const double dist = bl_distance(mu, mk, support_cap).value;
    out.push_back({k, dist, radius, dist < radius});
  }
  return out;
}

}  // namespace selfsim
