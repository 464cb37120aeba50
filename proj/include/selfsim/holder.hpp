// Local mass scaling at a point: Hölder exponent regression and the lower
// s-density proxy.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "selfsim/core.hpp"
#include "selfsim/measure.hpp"
#include "selfsim/spectrum.hpp"

namespace selfsim {

struct HolderEstimate {
  Point x;
  std::vector<double> radii;
  std::vector<double> masses;
  std::vector<double> log_radius;
  std::vector<double> log_mass;
  LinearFit fit;
  double slope = 0.0;      // regression of log mu(B(x,r)) on log r
  double min_chord = 0.0;  // smallest slope between consecutive radii
};

namespace detail {

inline std::vector<double> checked_ball_masses(const AtomicMeasure& mu, std::span<const double> x,
                                               std::span<const double> radii, const char* who) {
  if (radii.empty()) throw InputError(std::string(who) + ": no radii given");
  if (!strictly_decreasing(radii)) throw InputError(std::string(who) + ": radii must be strictly decreasing");
  const double floor = resolution_floor(mu);
  if (!(radii.back() > floor)) {
    throw InputError(std::string(who) + ": smallest radius " + std::to_string(radii.back()) +
                     " is not above the atom spacing " + std::to_string(floor) + " of the measure");
  }
  std::vector<double> masses;
  for (double r : radii) {
    const double m = ball_mass(mu, x, r);
    if (!(m > 0.0)) {
      throw EstimationError(std::string(who) + ": ball of radius " + std::to_string(r) +
                            " has zero mass; the point is off the support at that scale");
    }
    masses.push_back(m);
  }
  return masses;
}

}  // namespace detail

inline HolderEstimate local_holder(const AtomicMeasure& mu, std::span<const double> x,
                                   std::span<const double> radii) {
  if (radii.size() < 2) throw InputError("local_holder: need at least two radii");
  HolderEstimate out;
  out.x.assign(x.begin(), x.end());
  out.radii.assign(radii.begin(), radii.end());
  out.masses = detail::checked_ball_masses(mu, x, radii, "local_holder");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    out.log_radius.push_back(std::log(radii[k]));
    out.log_mass.push_back(std::log(out.masses[k]));
  }
  out.fit = least_squares(out.log_radius, out.log_mass);
  out.slope = out.fit.slope;
  out.min_chord = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < radii.size(); ++k) {
    const double chord =
        (out.log_mass[k] - out.log_mass[k - 1]) / (out.log_radius[k] - out.log_radius[k - 1]);
    out.min_chord = std::min(out.min_chord, chord);
  }
  return out;
}

struct LowerDensity {
  double value = 0.0;           // minimum over the radii
  std::vector<double> radii;
  std::vector<double> ratios;   // (2r)^-s mu(B(a, r))
};

inline LowerDensity lower_density(const AtomicMeasure& lambda, std::span<const double> a, double s,
                                  std::span<const double> radii) {
  if (!(s >= 0.0)) throw InputError("lower_density: s must be >= 0");
  const auto masses = detail::checked_ball_masses(lambda, a, radii, "lower_density");
  LowerDensity out;
  out.radii.assign(radii.begin(), radii.end());
  for (std::size_t k = 0; k < radii.size(); ++k) out.ratios.push_back(std::pow(2.0 * radii[k], -s) * masses[k]);
  out.value = *std::min_element(out.ratios.begin(), out.ratios.end());
  return out;
}

}  // namespace selfsim
