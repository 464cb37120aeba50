// L^q spectrum, its Legendre transform on a finite q-grid, and the coarse
// (box-counting) multifractal spectrum.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "selfsim/core.hpp"
#include "selfsim/histogram.hpp"
#include "selfsim/measure.hpp"

namespace selfsim {

/// Sampled curve x -> y with the finite-scale data it was derived from.
struct SpectrumCurve {
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<int> levels;                       // dyadic levels of the window, if any
  std::vector<std::vector<double>> per_level;    // [sample][level]; NaN where a level has no value
  std::vector<double> window;                    // window min (liminf proxy) or max (limsup proxy)
  std::vector<LinearFit> fits;                   // per sample, when y is a regression slope
  std::string aux_label;
  std::vector<double> aux;                       // e.g. the minimizing q of a Legendre transform
  std::vector<std::string> notes;

  std::size_t size() const { return x.size(); }
};

struct LevelWindow {
  int lo = 0;
  int hi = 0;

  std::vector<int> levels() const {
    std::vector<int> out;
    for (int j = lo; j <= hi; ++j) out.push_back(j);
    return out;
  }
};

inline void check_window(const LevelWindow& w, int min_levels) {
  if (w.lo < 1 || w.hi > kMaxDyadicLevel || w.hi - w.lo + 1 < min_levels) {
    throw InputError("level window " + std::to_string(w.lo) + ":" + std::to_string(w.hi) + " must lie in [1, " +
                     std::to_string(kMaxDyadicLevel) + "] with at least " + std::to_string(min_levels) +
                     " levels");
  }
}

/// Smallest atom spacing, or 0 for a single atom (no discretization floor).
inline double resolution_floor(const AtomicMeasure& mu) {
  const double gap = min_atom_spacing(mu);
  return std::isfinite(gap) ? gap : 0.0;
}

/// T_j(q) = -log2(sum_Q mu(Q)^q) / j per level, the window minimum, and the
/// least-squares slope of -log2 S_j(q) against j, which is reported as y.
inline SpectrumCurve tau_estimate(const AtomicMeasure& mu, LevelWindow window, std::span<const double> q_grid) {
  if (q_grid.empty()) throw InputError("tau_estimate: empty q grid");
  check_window(window, 2);
  if (!strictly_increasing(q_grid)) throw InputError("tau_estimate: q grid must be strictly increasing");

  SpectrumCurve out;
  out.x_label = "q";
  out.y_label = "tau";
  out.levels = window.levels();
  const auto pyramid = dyadic_pyramid(mu, window.lo, window.hi);

  const double floor = resolution_floor(mu);
  if (floor > std::exp2(-static_cast<double>(window.hi))) {
    out.notes.push_back("resolution floor: atom spacing " + std::to_string(floor) +
                        " exceeds the finest box side 2^-" + std::to_string(window.hi));
  }

  std::vector<double> js;
  for (int j : out.levels) js.push_back(static_cast<double>(j));
  for (double q : q_grid) {
    std::vector<double> logs;
    std::vector<double> per;
    for (std::size_t k = 0; k < pyramid.size(); ++k) {
      const double v = -std::log2(partition_sum(pyramid[k], q));
      logs.push_back(v);
      per.push_back(v / js[k]);
    }
    const LinearFit fit = least_squares(js, logs);
    out.x.push_back(q);
    out.y.push_back(fit.slope);
    out.window.push_back(*std::min_element(per.begin(), per.end()));
    out.per_level.push_back(std::move(per));
    out.fits.push_back(fit);
  }
  return out;
}

/// tau*(h) = min over the sampled q of (q h - tau(q)). The infimum is only
/// taken over the grid of `tau`.
inline SpectrumCurve legendre_transform(const SpectrumCurve& tau, std::span<const double> h_grid) {
  if (tau.x.empty() || h_grid.empty()) throw InputError("legendre_transform: empty grid");
  if (!strictly_increasing(h_grid)) throw InputError("legendre_transform: h grid must be strictly increasing");
  SpectrumCurve out;
  out.x_label = "h";
  out.y_label = "tau_star";
  out.aux_label = "argmin_q";
  for (double h : h_grid) {
    double best = std::numeric_limits<double>::infinity();
    double arg = tau.x.front();
    for (std::size_t k = 0; k < tau.x.size(); ++k) {
      const double v = tau.x[k] * h - tau.y[k];
      if (v < best) {
        best = v;
        arg = tau.x[k];
      }
    }
    out.x.push_back(h);
    out.y.push_back(best);
    out.aux.push_back(arg);
  }
  return out;
}

struct CoarseOptions {
  double eps = 0.05;
  std::size_t min_boxes = 2;  // bins with fewer boxes at a level give no value there
};

/// f_j(h) = log2 #{Q : h - eps < -log2 mu(Q) / j <= h + eps} / j and its
/// maximum over the window. Bins empty at every level are dropped.
inline SpectrumCurve coarse_spectrum(const AtomicMeasure& mu, LevelWindow window, std::span<const double> h_bins,
                                     const CoarseOptions& options = {}) {
  if (!(options.eps > 0.0)) throw InputError("coarse_spectrum: eps must be positive");
  if (h_bins.empty()) throw InputError("coarse_spectrum: empty h grid");
  if (options.min_boxes < 1) throw InputError("coarse_spectrum: min_boxes must be >= 1");
  if (!strictly_increasing(h_bins)) throw InputError("coarse_spectrum: h grid must be strictly increasing");
  check_window(window, 1);

  SpectrumCurve out;
  out.x_label = "h";
  out.y_label = "coarse_dim";
  out.levels = window.levels();
  const auto pyramid = dyadic_pyramid(mu, window.lo, window.hi);

  // Exponents per level, sorted, so each bin is a binary-search range.
  std::vector<std::vector<double>> exponents;
  for (const auto& hist : pyramid) {
    std::vector<double> e;
    e.reserve(hist.size());
    for (const auto& b : hist.boxes) e.push_back(-std::log2(b.mass) / static_cast<double>(hist.level));
    std::sort(e.begin(), e.end());
    exponents.push_back(std::move(e));
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double h : h_bins) {
    std::vector<double> per;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pyramid.size(); ++k) {
      const auto& e = exponents[k];
      const auto first = std::upper_bound(e.begin(), e.end(), h - options.eps);
      const auto last = std::upper_bound(e.begin(), e.end(), h + options.eps);
      const auto count = static_cast<std::size_t>(last - first);
      if (count >= options.min_boxes) {
        const double v = std::log2(static_cast<double>(count)) / static_cast<double>(pyramid[k].level);
        per.push_back(v);
        best = std::max(best, v);
      } else {
        per.push_back(nan);
      }
    }
    if (std::isfinite(best)) {
      out.x.push_back(h);
      out.y.push_back(best);
      out.window.push_back(best);
      out.per_level.push_back(std::move(per));
    }
  }
  return out;
}

}  // namespace selfsim
