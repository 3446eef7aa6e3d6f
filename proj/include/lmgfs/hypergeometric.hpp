#pragma once

// Hypergeometric weights H(p; 2j, 2j1, m) = C(2j1, p) C(2j2, m-p) / C(2j, m),
// with 2j2 = 2j - 2j1: the probability that p of m collective excitations of a
// spin-j Dicke state sit in the spin-j1 block. Computed in log space; naive
// binomials overflow around 2j ~ 60.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lmgfs/errors.hpp"

namespace lmgfs {

namespace detail {

// std::lgamma writes the global signgam on glibc; the reentrant variant keeps
// concurrent sweeps race-free.
inline double log_gamma(double x) {
#if defined(__GLIBC__) || defined(__APPLE__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

}  // namespace detail

inline double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return detail::log_gamma(n + 1.0) - detail::log_gamma(k + 1.0) - detail::log_gamma(n - k + 1.0);
}

/// Table of log(k!) for k = 0..n_max, for repeated binomials over one size.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(int n_max) : values_(static_cast<std::size_t>(n_max) + 1) {
    for (int k = 0; k <= n_max; ++k) values_[static_cast<std::size_t>(k)] = detail::log_gamma(k + 1.0);
  }

  int n_max() const noexcept { return static_cast<int>(values_.size()) - 1; }

  double log_factorial(int k) const { return values_[static_cast<std::size_t>(k)]; }

  double log_binomial(int n, int k) const {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
  }

 private:
  std::vector<double> values_;
};

namespace detail {

inline void check_weight_args(int p, int two_j, int two_j1, int m) {
  if (two_j1 < 0 || two_j1 > two_j || p < 0 || p > two_j1 || m < 0 || m > two_j) {
    throw InvalidArgument("hypergeometric_weight: arguments out of range (p=" + std::to_string(p) +
                          ", 2j=" + std::to_string(two_j) + ", 2j1=" + std::to_string(two_j1) +
                          ", m=" + std::to_string(m) + ")");
  }
}

}  // namespace detail

/// log H(p; 2j, 2j1, m); -inf where the weight vanishes.
inline double log_hypergeometric_weight(int p, int two_j, int two_j1, int m) {
  detail::check_weight_args(p, two_j, two_j1, m);
  const int two_j2 = two_j - two_j1;
  if (m - p < 0 || m - p > two_j2) return -std::numeric_limits<double>::infinity();
  return log_binomial(two_j1, p) + log_binomial(two_j2, m - p) - log_binomial(two_j, m);
}

inline double hypergeometric_weight(int p, int two_j, int two_j1, int m) {
  const double lw = log_hypergeometric_weight(p, two_j, two_j1, m);
  return std::isinf(lw) ? 0.0 : std::exp(lw);
}

}  // namespace lmgfs
