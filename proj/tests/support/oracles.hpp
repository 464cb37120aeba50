// Independent reference implementations used only by the tests. Each one is
// deliberately naive so that it shares no code path with the library.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Root of sum r_k^s = 1 by plain bisection on [0, 64].
inline double moran_bisection(const std::vector<double>& ratios) {
  auto f = [&](double s) {
    double acc = -1.0;
    for (double r : ratios) acc += std::pow(r, s);
    return acc;
  };
  double lo = 0.0;
  double hi = 64.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Cut set by exhaustive enumeration of all words up to `max_len`, keeping
/// those with product <= R whose parent product is > R (the root counts as
/// above R). Letters are 0-based.
inline std::vector<std::vector<std::uint32_t>> cut_set_brute(const std::vector<double>& ratios, double R,
                                                             std::size_t max_len) {
  std::vector<std::vector<std::uint32_t>> out;
  const double tol = 1e-12;
  std::function<void(std::vector<std::uint32_t>&, double)> walk = [&](std::vector<std::uint32_t>& w, double prod) {
    if (w.size() == max_len) return;
    for (std::uint32_t a = 0; a < ratios.size(); ++a) {
      w.push_back(a);
      const double p = prod * ratios[a];
      if (p <= R * (1.0 + tol)) {
        out.push_back(w);
      } else {
        walk(w, p);
      }
      w.pop_back();
    }
  };
  std::vector<std::uint32_t> w;
  walk(w, 1.0);
  return out;
}

/// Largest subset with pairwise distance > 2r, by exhaustive search (n <= 20).
inline std::size_t max_packing_brute(const std::vector<double>& points, double r) {
  const std::size_t n = points.size();
  if (n > 20) throw std::invalid_argument("max_packing_brute: too many points");
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      ++count;
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((mask >> j & 1u) && !(std::abs(points[i] - points[j]) > 2.0 * r)) {
          ok = false;
          break;
        }
      }
    }
    if (ok && count > best) best = count;
  }
  return best;
}

/// Level-j box index of x in [0,1] by linear scan over box edges.
inline std::int64_t box_index_brute(double x, int j) {
  const std::int64_t boxes = std::int64_t{1} << j;
  const double side = std::ldexp(1.0, -j);
  for (std::int64_t k = 0; k < boxes; ++k) {
    if (x >= static_cast<double>(k) * side && x < static_cast<double>(k + 1) * side) return k;
  }
  if (x == 1.0) return boxes - 1;
  throw std::invalid_argument("box_index_brute: x outside [0,1]");
}

/// 1-D histogram by brute force: box index -> mass.
inline std::map<std::int64_t, double> histogram_brute(const std::vector<double>& xs, const std::vector<double>& ms,
                                                      int j) {
  std::map<std::int64_t, double> out;
  for (std::size_t i = 0; i < xs.size(); ++i) out[box_index_brute(xs[i], j)] += ms[i];
  return out;
}

/// Dense tableau simplex, Bland's rule: maximize c.x subject to A x <= b,
/// x >= 0, with b >= 0 so the slack basis is feasible.
inline double simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                          const std::vector<double>& c, std::vector<double>* solution = nullptr) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0.0) throw std::invalid_argument("simplex_max: negative rhs");
    for (std::size_t k = 0; k < n; ++k) t[i][k] = A[i][k];
    t[i][n + i] = 1.0;
    t[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t k = 0; k < n; ++k) t[m][k] = -c[k];
  const double eps = 1e-12;
  for (int iter = 0; iter < 100000; ++iter) {
    std::size_t enter = cols;
    for (std::size_t k = 0; k + 1 < cols; ++k) {
      if (t[m][k] < -eps) {
        enter = k;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > eps) {
        const double ratio = t[i][cols - 1] / t[i][enter];
        if (ratio < best - eps || (ratio <= best + eps && leave < m && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) throw std::runtime_error("simplex_max: unbounded");
    const double piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      const double f = t[i][enter];
      for (std::size_t k = 0; k < cols; ++k) t[i][k] -= f * t[leave][k];
    }
    basis[leave] = enter;
  }
  if (solution) {
    solution->assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) (*solution)[basis[i]] = t[i][cols - 1];
    }
  }
  return t[m][cols - 1];
}

/// Bounded-Lipschitz distance between two weighted point sets in R^d, written
/// straight from the definition: maximize sum w_k f_k with |f_k| <= 1 and
/// |f_a - f_b| <= |x_a - x_b|. Substituting g = f + 1 >= 0 makes every
/// right-hand side non-negative.
inline double bl_distance_lp(const std::vector<std::vector<double>>& points, const std::vector<double>& w) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = 0; c < n; ++c) {
      if (a == c) continue;
      double d2 = 0.0;
      for (std::size_t k = 0; k < points[a].size(); ++k) d2 += (points[a][k] - points[c][k]) * (points[a][k] - points[c][k]);
      std::vector<double> row(n, 0.0);
      row[a] = 1.0;
      row[c] = -1.0;
      A.push_back(row);
      b.push_back(std::sqrt(d2));
    }
    std::vector<double> row(n, 0.0);
    row[a] = 1.0;
    A.push_back(row);
    b.push_back(2.0);
  }
  double shift = 0.0;
  for (double v : w) shift += v;
  return simplex_max(A, b, w) - shift;
}

}  // namespace oracle
