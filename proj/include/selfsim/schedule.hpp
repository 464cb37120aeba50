// Numeric schedules (d_n, alpha_n, beta_n, c_n, r_n, J_n) behind the three
// perturbation constructions, and the perturbed measures themselves.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selfsim/core.hpp"
#include "selfsim/ifs.hpp"
#include "selfsim/measure.hpp"
#include "selfsim/packing.hpp"

namespace selfsim {

enum class ScheduleKind { th1_dirac, th1_density, th2_packing, main_typical };

inline std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::th1_dirac: return "th1_dirac";
    case ScheduleKind::th1_density: return "th1_density";
    case ScheduleKind::th2_packing: return "th2_packing";
    case ScheduleKind::main_typical: return "main_typical";
  }
  return "unknown";
}

/// One index n of a schedule, with its named values.
struct Schedule {
  ScheduleKind kind = ScheduleKind::th1_dirac;
  int n = 0;
  std::map<std::string, double, std::less<>> values;

  double at(std::string_view key) const {
    auto it = values.find(key);
    if (it == values.end()) throw InputError("schedule has no value '" + std::string(key) + "'");
    return it->second;
  }

  /// Keys that form sequences in n and must strictly decrease.
  std::vector<std::string> sequence_keys() const {
    switch (kind) {
      case ScheduleKind::th1_dirac: return {"d_n", "beta_n", "alpha_n", "r_n", "c_n"};
      case ScheduleKind::th1_density: return {"alpha_n", "d_n", "r_n", "c_n"};
      case ScheduleKind::th2_packing: return {"alpha_n", "r_n"};
      case ScheduleKind::main_typical: return {"beta_n", "radius_n"};
    }
    return {};
  }

  /// Dirac perturbation at a point: beta = 1/log|log d|, alpha = d^beta,
  /// r = d^{theta s}, c = d^{theta s / 2}; requires theta > 2/s.
  static Schedule dirac(int n, double d_n, double theta, double s) {
    if (!(s > 0.0)) throw InputError("th1_dirac schedule: s must be positive");
    if (!(theta > 2.0 / s)) throw InputError("th1_dirac schedule: theta must exceed 2/s");
    if (!(d_n > 0.0 && d_n < std::exp(-1.0))) {
      throw InputError("th1_dirac schedule: d_n must lie in (0, 1/e) so that beta_n > 0");
    }
    const double beta = 1.0 / std::log(std::abs(std::log(d_n)));
    Schedule out{ScheduleKind::th1_dirac, n, {}};
    out.values = {{"d_n", d_n},
                  {"beta_n", beta},
                  {"alpha_n", std::pow(d_n, beta)},
                  {"r_n", std::pow(d_n, theta * s)},
                  {"c_n", std::pow(d_n, theta * s / 2.0)},
                  {"theta", theta},
                  {"s", s}};
    return out;
  }

  /// Density variant: d = exp(-1/alpha), r = d^{theta s}, c = d^{(theta-1)s/2};
  /// requires theta > 1 + 2/s.
  static Schedule density(int n, double alpha_n, double theta, double s) {
    if (!(s > 0.0)) throw InputError("th1_density schedule: s must be positive");
    if (!(theta > 1.0 + 2.0 / s)) throw InputError("th1_density schedule: theta must exceed 1 + 2/s");
    if (!(alpha_n > 0.0 && alpha_n < 1.0)) throw InputError("th1_density schedule: alpha_n must lie in (0,1)");
    const double d = std::exp(-1.0 / alpha_n);
    Schedule out{ScheduleKind::th1_density, n, {}};
    out.values = {{"alpha_n", alpha_n},
                  {"d_n", d},
                  {"beta_n", std::log(alpha_n) / std::log(d)},
                  {"r_n", std::pow(d, theta * s)},
                  {"c_n", std::pow(d, (theta - 1.0) * s / 2.0)},
                  {"theta", theta},
                  {"s", s}};
    return out;
  }

  /// Packing perturbation: alpha = 2^{-sqrt n}, r = 2^{-(s+2)n}.
  static Schedule packing(int n, double s) {
    if (n < 1) throw InputError("th2_packing schedule: n must be >= 1");
    if (!(s >= 0.0)) throw InputError("th2_packing schedule: s must be >= 0");
    Schedule out{ScheduleKind::th2_packing, n, {}};
    out.values = {{"alpha_n", std::exp2(-std::sqrt(static_cast<double>(n)))},
                  {"r_n", std::exp2(-(s + 2.0) * n)},
                  {"s", s}};
    return out;
  }

  /// Typical approximant: beta = J/n, approximation radius 2^{-s J^2}.
  static Schedule typical(int n, int level, double s) {
    if (n < 1 || level < 0) throw InputError("main_typical schedule: need n >= 1 and J >= 0");
    if (level > n) throw InputError("main_typical schedule: beta_n = J/n exceeds 1 (need n >= J)");
    Schedule out{ScheduleKind::main_typical, n, {}};
    const double j = static_cast<double>(level);
    out.values = {{"J_n", j},
                  {"beta_n", j / static_cast<double>(n)},
                  {"radius_n", std::exp2(-s * j * j)},
                  {"s", s}};
    return out;
  }
};

/// Checks that every sequence value strictly decreases along consecutive
/// entries (which must share a kind and have increasing n).
inline void check_schedule_sequence(std::span<const Schedule> entries) {
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const auto& a = entries[i - 1];
    const auto& b = entries[i];
    if (a.kind != b.kind) throw ScheduleError("schedule sequence mixes kinds");
    if (!(b.n > a.n)) throw ScheduleError("schedule indices must increase");
    for (const auto& key : a.sequence_keys()) {
      if (!(b.at(key) < a.at(key))) {
        throw ScheduleError("schedule value " + key + " does not decrease between n=" + std::to_string(a.n) +
                            " and n=" + std::to_string(b.n));
      }
    }
  }
}

/// Measure plus the schedule that produced it.
struct PerturbedMeasure {
  AtomicMeasure measure;
  Schedule schedule;
  double weight = 0.0;       // mass moved onto the perturbing part
  std::size_t pieces = 0;    // atoms in the perturbing part (1, L_n, #I(2^-J))
};

/// alpha_n delta_a + (1 - alpha_n) nu; tent parameters (c_n, d_n) and r_n
/// travel in the schedule.
inline PerturbedMeasure dirac_perturbation(std::span<const double> a, const AtomicMeasure& nu,
                                           const Schedule& schedule) {
  if (schedule.kind != ScheduleKind::th1_dirac && schedule.kind != ScheduleKind::th1_density) {
    throw InputError("dirac_perturbation: needs a th1 schedule");
  }
  const double alpha = schedule.at("alpha_n");
  return {mixture(alpha, AtomicMeasure::dirac(a), nu), schedule, alpha, 1};
}

/// alpha_n Pi_n + (1 - alpha_n) nu with Pi_n uniform on a greedy packing of
/// radius 2^-n centered on an attractor sample ten times finer.
inline PerturbedMeasure packing_mixture(const IfsSystem& ifs, int n, const AtomicMeasure& nu, double s,
                                        const CutSetOptions& options = {}) {
  const Schedule schedule = Schedule::packing(n, s);
  const double radius = std::exp2(-static_cast<double>(n));
  const auto sample = sample_attractor(ifs, std::min(1.0, radius / 10.0), std::nullopt, options);
  if (sample.empty()) throw InternalError("packing_mixture: attractor sample is empty");
  const auto centers = packing_centers(sample, radius);
  const double alpha = schedule.at("alpha_n");
  return {mixture(alpha, AtomicMeasure::uniform(centers), nu), schedule, alpha, centers.size()};
}

/// beta_n lambda_n + (1 - beta_n) nu with beta_n = J/n and lambda_n the
/// natural measure at resolution 2^-J.
inline PerturbedMeasure typical_approximant(const IfsSystem& ifs, int n, int level, const AtomicMeasure& nu,
                                            const CutSetOptions& options = {}) {
  const Schedule schedule = Schedule::typical(n, level, similarity_dimension(ifs));
  const AtomicMeasure lambda = natural_measure(ifs, std::exp2(-static_cast<double>(level)), std::nullopt, options);
  const double beta = schedule.at("beta_n");
  return {mixture(beta, lambda, nu), schedule, beta, lambda.size()};
}

}  // namespace selfsim
