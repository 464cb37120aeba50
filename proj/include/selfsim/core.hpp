// Shared vocabulary for the selfsim library: points, error types, and the
// small numeric helpers (compensated sums, distances, least squares) that
// every module leans on.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace selfsim {

/// A point of R^d. Dimension is carried by the vector length.
using Point = std::vector<double>;

/// Precondition violated by the caller (bad argument, malformed file, ...).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed a configured size cap.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numeric schedule (J levels, theta, radii) is inconsistent.
struct ScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A multi-step construction could not be completed.
struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An estimator was asked for a quantity the data cannot support.
struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Broken internal invariant.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

/// Euclidean distance.
inline double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() == 1 && b.size() == 1) return std::abs(a[0] - b[0]);
  return std::sqrt(squared_distance(a, b));
}

/// Neumaier summation; order-fixed, so results are reproducible.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

/// Ordinary least-squares line y = slope * x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square of the residuals
  std::size_t count = 0;
};

inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("least_squares: x and y differ in length");
  if (x.size() < 2) throw InputError("least_squares: need at least two samples");
  const auto n = static_cast<double>(x.size());
  const double mean_x = compensated_sum(x) / n;
  const double mean_y = compensated_sum(y) / n;
  CompensatedSum sxx;
  CompensatedSum sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mean_x) * (x[i] - mean_x));
    sxy.add((x[i] - mean_x) * (y[i] - mean_y));
  }
  if (sxx.value() <= 0.0) throw InputError("least_squares: abscissae are all equal");

  LinearFit fit;
  fit.count = x.size();
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = mean_y - fit.slope * mean_x;
  CompensatedSum rss;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    rss.add(r * r);
  }
  fit.residual = std::sqrt(rss.value() / n);
  return fit;
}

/// Inclusive-endpoint grid of n points: a, a + (b-a)/(n-1), ..., b.
inline std::vector<double> linear_grid(double start, double end, std::size_t count) {
  if (count < 2) throw InputError("grid needs at least two points");
  if (!(start < end)) throw InputError("grid: start < end required");
  std::vector<double> out(count);
  const double step = (end - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
  out.back() = end;
  return out;
}

inline bool strictly_increasing(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(),
                            [](double a, double b) { return !(a < b); }) == values.end();
}

inline bool strictly_decreasing(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(),
                            [](double a, double b) { return !(a > b); }) == values.end();
}

}  // namespace selfsim
