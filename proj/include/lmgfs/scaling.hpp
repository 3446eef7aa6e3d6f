#pragma once

// Scaling-analysis helpers: least-squares line fits (log-log exponents) and
// parabolic refinement of a sampled maximum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "lmgfs/errors.hpp"

namespace lmgfs {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("fit_line: need at least two (x, y) pairs of equal length");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_line: degenerate abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

/// Exponent b of y ~ x^b from a least-squares fit of ln y against ln x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("loglog_slope: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly).slope;
}

/// Geometrically spaced points from lo to hi inclusive.
inline std::vector<double> geomspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  return out;
}

/// Evenly spaced points from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

struct Peak {
  double location = 0.0;
  double height = 0.0;
  std::size_t grid_index = 0;
};

/// Maximum of sampled data, refined by the parabola through the grid maximum
/// and its two neighbours. A maximum on either end of the grid is an error:
/// the true peak may lie outside.
inline Peak refine_peak(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw InvalidArgument("refine_peak: need >= 3 samples");
  const auto it = std::max_element(y.begin(), y.end());
  const auto i = static_cast<std::size_t>(std::distance(y.begin(), it));
  if (i == 0 || i + 1 == y.size()) {
    throw InvalidArgument("refine_peak: maximum sits on the grid boundary (x=" + std::to_string(x[i]) +
                          "); widen the grid");
  }
  const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
  const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
  // Newton form of the interpolating parabola.
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (!(curvature < 0.0)) return {x1, y1, i};
  const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
  const double height = y0 + d01 * (vertex - x0) + curvature * (vertex - x0) * (vertex - x1);
  return {vertex, height, i};
}

}  // namespace lmgfs
