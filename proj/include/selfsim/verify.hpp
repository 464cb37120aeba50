// Finite-scale checks of the scaling inequalities: the ball-mass lower bound
// on Lambda_theta, the multifractal formalism for a reference measure, and
// the mass exponents of a cascade.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfsim/cascade.hpp"
#include "selfsim/core.hpp"
#include "selfsim/histogram.hpp"
#include "selfsim/ifs.hpp"
#include "selfsim/measure.hpp"
#include "selfsim/spectrum.hpp"

namespace selfsim {

struct BallMassReport {
  double theta = 1.0;
  int level = 0;
  double s = 0.0;
  double eps = 0.0;
  double radius = 0.0;        // 2 * 2^{-theta J}
  std::size_t anchors = 0;
  double min_mass = 0.0;
  double min_ratio = 0.0;     // min_x mu(B(x, radius)) 2^{s(1+eps)J}: the empirical constant
  std::string argmin_word;
  std::optional<double> bound;  // expected lower bound on min_ratio, if supplied
  bool positive = false;
  bool passed = false;          // positive, and above the bound when one is given
};

/// For every anchor x_w of I(2^-J), mu(B(x_w, 2 * 2^{-theta J})) 2^{s(1+eps)J}.
/// `measure_resolution` is the scale mu was built at and must not exceed 2^{-theta J}.
inline BallMassReport verify_majholdmu(const AtomicMeasure& mu, const IfsSystem& ifs, double theta, int level,
                                       double s, double eps, double measure_resolution,
                                       std::optional<double> bound = std::nullopt,
                                       const CutSetOptions& options = {}) {
  if (!(theta >= 1.0)) throw InputError("verify_majholdmu: theta must be >= 1");
  if (level < 0) throw InputError("verify_majholdmu: J must be >= 0");
  const double scale = std::exp2(-theta * level);
  if (!(measure_resolution > 0.0) || measure_resolution > scale * (1.0 + 1e-12)) {
    throw InputError("verify_majholdmu: measure resolution " + std::to_string(measure_resolution) +
                     " is coarser than 2^{-theta J} = " + std::to_string(scale));
  }
  BallMassReport out;
  out.theta = theta;
  out.level = level;
  out.s = s;
  out.eps = eps;
  out.radius = 2.0 * scale;
  out.bound = bound;

  const CutSet cut = cut_set(ifs, std::exp2(-static_cast<double>(level)), options);
  const Point base = default_base(ifs);
  out.anchors = cut.size();
  out.min_mass = std::numeric_limits<double>::infinity();
  for (const auto& w : cut.words) {
    const double m = ball_mass(mu, anchor_point(ifs, w, base), out.radius);
    if (m < out.min_mass) {
      out.min_mass = m;
      out.argmin_word = w.to_string();
    }
  }
  out.min_ratio = out.min_mass * std::exp2(s * (1.0 + eps) * level);
  out.positive = out.min_ratio > 0.0;
  out.passed = out.positive && (!bound || out.min_ratio >= *bound * (1.0 - 1e-12));
  return out;
}

struct ConcavityViolation {
  int level = 0;
  double q = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct FormalismReport {
  double s = 0.0;
  double tol = 0.0;
  SpectrumCurve tau;
  SpectrumCurve legendre;
  double tau_error = 0.0;        // max_q |tau(q) - s(q - 1)|
  double legendre_error = 0.0;   // max_h |tau*(h) - h|
  std::size_t concavity_checks = 0;
  std::vector<ConcavityViolation> concavity_violations;
  bool concavity_holds = true;
  bool passed = false;
};

inline constexpr double kConcavitySlack = 1e-12;

/// sum_Q mu(Q)^q <= N_j^{1-q} at every level of the window and every q in [0,1]
/// of the grid; violations beyond a relative 1e-12 are returned.
inline std::vector<ConcavityViolation> concavity_violations(const AtomicMeasure& mu, LevelWindow window,
                                                            std::span<const double> q_grid,
                                                            std::size_t* checks = nullptr) {
  std::vector<ConcavityViolation> out;
  const auto pyramid = dyadic_pyramid(mu, window.lo, window.hi);
  std::size_t n = 0;
  for (const auto& hist : pyramid) {
    const double count = static_cast<double>(hist.size());
    for (double q : q_grid) {
      if (q < 0.0 || q > 1.0) continue;
      const double lhs = partition_sum(hist, q);
      const double rhs = std::pow(count, 1.0 - q);
      ++n;
      if (lhs > rhs * (1.0 + kConcavitySlack)) out.push_back({hist.level, q, lhs, rhs});
    }
  }
  if (checks) *checks = n;
  return out;
}

/// (a) tau against s(q-1), (b) its Legendre transform against h, (c) the
/// concavity bound, (d) pass/fail of (a), (b) against tol.
inline FormalismReport verify_formalism(const AtomicMeasure& mu, double s, std::span<const double> q_grid,
                                        std::span<const double> h_grid, LevelWindow window, double tol) {
  if (q_grid.empty() || h_grid.empty()) throw InputError("verify_formalism: empty grid");
  if (!(tol > 0.0)) throw InputError("verify_formalism: tol must be positive");
  FormalismReport out;
  out.s = s;
  out.tol = tol;
  out.tau = tau_estimate(mu, window, q_grid);
  out.legendre = legendre_transform(out.tau, h_grid);
  for (std::size_t k = 0; k < out.tau.size(); ++k) {
    out.tau_error = std::max(out.tau_error, std::abs(out.tau.y[k] - s * (out.tau.x[k] - 1.0)));
  }
  for (std::size_t k = 0; k < out.legendre.size(); ++k) {
    out.legendre_error = std::max(out.legendre_error, std::abs(out.legendre.y[k] - out.legendre.x[k]));
  }
  out.concavity_violations = concavity_violations(mu, window, q_grid, &out.concavity_checks);
  out.concavity_holds = out.concavity_violations.empty();
  out.passed = out.tau_error <= tol && out.legendre_error <= tol;
  return out;
}

struct CascadeLevelStats {
  int level = 0;
  int exponent = 0;                // J_{N_p}
  std::size_t cells = 0;
  double min_exponent = 0.0;       // log2 m(V) / (-J)
  double max_exponent = 0.0;
  double max_deviation = 0.0;      // max |exponent - s|
  double window_lo = 0.0;          // s(1 - 2/p)
  double window_hi = 0.0;          // s(1 + 1/p)
  std::size_t inside_window = 0;
  bool window_holds = false;
  bool growth_condition = false;
};

struct CascadeScalingReport {
  double s = 0.0;
  double theta = 1.0;
  std::vector<CascadeLevelStats> levels;
  std::size_t ball_samples = 0;
  double ball_exponent = 0.0;      // s/theta - 2/(P-1)
  std::optional<double> empirical_constant;  // max m(B) / |B|^{ball_exponent}
  std::vector<std::string> notes;
};

/// Per-level cell exponents and, for depth >= 2, `samples` seeded random balls
/// scored by m(B) / |B|^{s/theta - 2/(P-1)} against the deepest level.
inline CascadeScalingReport cascade_scaling_check(const CascadeTree& tree, double s, std::uint64_t seed = 0,
                                                  std::size_t samples = 100) {
  if (tree.depth() == 0) throw InputError("cascade_scaling_check: empty tree");
  CascadeScalingReport out;
  out.s = s;
  out.theta = tree.theta;
  for (std::size_t p = 1; p <= tree.depth(); ++p) {
    const BallFamily& family = tree.family(p);
    CascadeLevelStats st;
    st.level = static_cast<int>(p);
    st.exponent = family.resolution_exponent;
    st.cells = family.balls.size();
    st.window_lo = s * (1.0 - 2.0 / static_cast<double>(p));
    st.window_hi = s * (1.0 + 1.0 / static_cast<double>(p));
    st.growth_condition = family.growth_condition;
    st.min_exponent = std::numeric_limits<double>::infinity();
    st.max_exponent = -std::numeric_limits<double>::infinity();
    const double j = static_cast<double>(family.resolution_exponent);
    for (const auto& ball : family.balls) {
      const double e = j > 0.0 ? std::log2(static_cast<double>(ball.mass_denominator)) / j : 0.0;
      st.min_exponent = std::min(st.min_exponent, e);
      st.max_exponent = std::max(st.max_exponent, e);
      st.max_deviation = std::max(st.max_deviation, std::abs(e - s));
      if (e >= st.window_lo - 1e-12 && e <= st.window_hi + 1e-12) ++st.inside_window;
    }
    st.window_holds = st.inside_window == st.cells;
    if (!st.window_holds) {
      out.notes.push_back("level " + std::to_string(p) + ": " + std::to_string(st.cells - st.inside_window) +
                          " cells outside the exponent window");
    }
    out.levels.push_back(st);
  }

  if (tree.depth() < 2) {
    out.notes.push_back("random-ball constant needs depth >= 2; skipped");
    return out;
  }
  const auto deepest = cascade_to_atomic(tree, tree.depth());
  const double finest = tree.family(tree.depth()).separation_radius;
  out.ball_exponent = s / tree.theta - 2.0 / static_cast<double>(tree.depth() - 1);
  out.ball_samples = samples;
  DeterministicRng rng(seed);
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto center = deepest.point(static_cast<std::size_t>(rng.below(deepest.size())));
    const double r = std::exp2(rng.uniform(std::log2(finest), 0.0));
    const double m = ball_mass(deepest, center, r);
    worst = std::max(worst, m / std::pow(2.0 * r, out.ball_exponent));
  }
  out.empirical_constant = worst;
  return out;
}

}  // namespace selfsim
