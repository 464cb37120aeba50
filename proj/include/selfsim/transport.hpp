// Dense uncapacitated transportation problem solved by successive shortest
// paths with node potentials (a primal-dual LP method).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "selfsim/core.hpp"

namespace selfsim {

struct TransportSolution {
  double cost = 0.0;
  // Dual potentials: sink_potential[t] - source_potential[s] <= cost(s, t),
  // with equality wherever flow(s, t) > 0.
  std::vector<double> source_potential;
  std::vector<double> sink_potential;
  std::vector<double> flow;  // row-major sources x sinks
  std::size_t augmentations = 0;
};

/// min sum f_st c_st subject to row sums = supply, column sums = demand, f >= 0.
/// `cost` is row-major (supply.size() x demand.size()) and non-negative.
inline TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                         std::span<const double> cost) {
  const std::size_t ns = supply.size();
  const std::size_t nt = demand.size();
  if (cost.size() != ns * nt) throw InputError("transport: cost matrix has the wrong size");
  for (double c : cost) {
    if (!(c >= 0.0)) throw InputError("transport: costs must be non-negative");
  }
  const double total = compensated_sum(supply);
  if (std::abs(total - compensated_sum(demand)) > 1e-9 * std::max(1.0, total)) {
    throw InputError("transport: supply and demand totals differ");
  }

  TransportSolution sol;
  sol.source_potential.assign(ns, 0.0);
  sol.sink_potential.assign(nt, 0.0);
  sol.flow.assign(ns * nt, 0.0);
  if (ns == 0 || nt == 0) return sol;

  std::vector<double> left(supply.begin(), supply.end());
  std::vector<double> need(demand.begin(), demand.end());
  const double eps = 1e-15 * std::max(1.0, total);
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Node layout: sources [0, ns), sinks [ns, ns + nt).
  const std::size_t n = ns + nt;
  std::vector<double> dist(n);
  std::vector<std::size_t> pred(n);
  std::vector<char> done(n);
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  auto potential = [&](std::size_t v) -> double& {
    return v < ns ? sol.source_potential[v] : sol.sink_potential[v - ns];
  };

  const std::size_t max_iterations = 64 * (n + 1) * (n + 1);
  auto open = [&](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [&](double x) { return x > eps; });
  };
  while (open(left) && open(need)) {
    if (++sol.augmentations > max_iterations) throw InternalError("transport: no convergence");
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(pred.begin(), pred.end(), none);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t s = 0; s < ns; ++s) {
      if (left[s] > eps) dist[s] = 0.0;
    }
    std::size_t target = none;
    while (true) {
      std::size_t u = none;
      for (std::size_t v = 0; v < n; ++v) {
        if (!done[v] && dist[v] < inf && (u == none || dist[v] < dist[u])) u = v;
      }
      if (u == none) break;
      done[u] = 1;
      if (u >= ns && need[u - ns] > eps) {
        target = u;
        break;
      }
      if (u < ns) {
        const double pu = sol.source_potential[u];
        for (std::size_t t = 0; t < nt; ++t) {
          const std::size_t v = ns + t;
          if (done[v]) continue;
          const double reduced = std::max(0.0, cost[u * nt + t] + pu - sol.sink_potential[t]);
          if (dist[u] + reduced < dist[v]) {
            dist[v] = dist[u] + reduced;
            pred[v] = u;
          }
        }
      } else {
        const std::size_t t = u - ns;
        const double pt = sol.sink_potential[t];
        for (std::size_t s = 0; s < ns; ++s) {
          if (done[s] || sol.flow[s * nt + t] <= eps) continue;
          const double reduced = std::max(0.0, -cost[s * nt + t] + pt - sol.source_potential[s]);
          if (dist[u] + reduced < dist[s]) {
            dist[s] = dist[u] + reduced;
            pred[s] = u;
          }
        }
      }
    }
    if (target == none) throw InternalError("transport: no augmenting path");

    const double reach = dist[target];
    for (std::size_t v = 0; v < n; ++v) potential(v) += std::min(dist[v], reach);

    // Bottleneck along the path back to its source.
    double delta = need[target - ns];
    std::size_t v = target;
    while (pred[v] != none) {
      const std::size_t u = pred[v];
      if (u >= ns) delta = std::min(delta, sol.flow[v * nt + (u - ns)]);  // backward arc t -> s
      v = u;
    }
    delta = std::min(delta, left[v]);

    v = target;
    while (pred[v] != none) {
      const std::size_t u = pred[v];
      if (u < ns) {
        sol.flow[u * nt + (v - ns)] += delta;
      } else {
        sol.flow[v * nt + (u - ns)] -= delta;
      }
      v = u;
    }
    left[v] -= delta;
    need[target - ns] -= delta;
  }

  CompensatedSum c;
  for (std::size_t k = 0; k < sol.flow.size(); ++k) {
    if (sol.flow[k] > 0.0) c.add(sol.flow[k] * cost[k]);
  }
  sol.cost = c.value();
  return sol;
}

}  // namespace selfsim
