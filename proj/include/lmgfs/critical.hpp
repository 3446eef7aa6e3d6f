#pragma once

// Divergence exponents of the closed forms near h = 1, from log-log fits over
// |h - 1| in [1e-5, 1e-4]. Wider windows (e.g. 0.01..0.1) are still
// pre-asymptotic and bias the fitted exponents by several percent.

#include <cmath>
#include <vector>

#include "lmgfs/analytic.hpp"
#include "lmgfs/scaling.hpp"

namespace lmgfs {

struct FitWindow {
  double lo = 1e-5;
  double hi = 1e-4;
  std::size_t count = 30;
};

struct DivergenceExponents {
  double broken_chi_r_per_n = 0.0;  // expected -1/2
  double symmetric_chi_r = 0.0;     // expected -2
  double broken_entropy = 0.0;      // slope of E vs ln|h - 1|, expected -1/4
  double symmetric_entropy = 0.0;
};

/// The broken-phase fit uses the coefficient of N, i.e. lim chi_r / N.
inline DivergenceExponents divergence_exponents(double gamma, double tau, int n, const FitWindow& window = {}) {
  const auto offsets = geomspace(window.lo, window.hi, window.count);
  std::vector<double> log_d, broken, symmetric, s_broken, s_symmetric;
  for (double d : offsets) {
    log_d.push_back(std::log(d));
    broken.push_back(std::log(chi_r_extensive(1.0 - d, gamma, tau)));
    symmetric.push_back(std::log(chi_r_analytic(1.0 + d, gamma, tau, n)));
    s_broken.push_back(entropy_analytic(1.0 - d, gamma, tau));
    s_symmetric.push_back(entropy_analytic(1.0 + d, gamma, tau));
  }
  return {fit_line(log_d, broken).slope, fit_line(log_d, symmetric).slope, fit_line(log_d, s_broken).slope,
          fit_line(log_d, s_symmetric).slope};
}

}  // namespace lmgfs
