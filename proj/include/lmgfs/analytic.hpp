#pragma once

// Thermodynamic-limit closed forms for the LMG ground state and its
// M-spin subsystem (tau = M/N fixed as N -> infinity).
//
//   alpha = sqrt((h-1)/(h-gamma))            h > 1
//         = sqrt((1-h^2)/(1-gamma))          h < 1
//   G++   = 1 + (1/alpha - 1) tau,   G-- = (1 - alpha) tau - 1
//   mu    = alpha^{-1/2} sqrt([tau alpha + 1 - tau][tau + alpha (1 - tau)])
//
// The reduced state is thermal-like, rho_A = 2/(mu+1) exp(-eps g^dag g) with
// eps = ln((mu+1)/(mu-1)). Note mu^2 - 1 = tau (1-tau) (1-alpha)^2 / alpha,
// so mu = 1 both at tau = 1 and on the line alpha = 1 (h^2 = gamma).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "lmgfs/errors.hpp"

namespace lmgfs {

/// Half-width of the excluded band around the critical field.
inline constexpr double kCriticalGuard = 1e-6;

struct GreensFunctions {
  double g_pp = 0.0;  // <(a^dag + a)^2>
  double g_mm = 0.0;  // <(a^dag - a)^2>
};

/// Everything the closed forms produce at one (h, gamma, tau, N).
struct AnalyticPoint {
  double h = 0.0;
  double gamma = 0.0;
  double tau = 0.0;
  int n = 0;
  double alpha = 0.0;
  double mu = 0.0;
  double g_pp = 0.0;
  double g_mm = 0.0;
  double varphi = 0.0;
  double epsilon = 0.0;  // +inf when mu == 1 (pure subsystem state)
  double theta0 = 0.0;
  double chi_g = 0.0;
  double chi_r = 0.0;
  double eta = 0.0;
  double entropy = 0.0;
};

namespace detail {

inline std::string at_point(double h, double gamma) {
  std::ostringstream os;
  os.precision(17);
  os << " at h=" << h << ", gamma=" << gamma;
  return os.str();
}

inline void check_field(double h, double gamma) {
  if (!std::isfinite(h) || h < 0.0) throw InvalidArgument("h must be finite and >= 0" + at_point(h, gamma));
  if (!std::isfinite(gamma) || gamma < 0.0 || gamma > 1.0) {
    throw InvalidArgument("gamma must lie in [0, 1]" + at_point(h, gamma));
  }
  if (gamma == 1.0) {
    throw InvalidArgument("closed forms do not cover the isotropic line gamma = 1" + at_point(h, gamma));
  }
  if (std::abs(h - 1.0) < kCriticalGuard) {
    throw SingularPoint("closed forms are singular at the critical field" + at_point(h, gamma));
  }
}

inline void check_tau(double tau) {
  if (!std::isfinite(tau) || tau <= 0.0 || tau > 1.0) {
    throw InvalidArgument("tau must lie in (0, 1], got " + std::to_string(tau));
  }
}

// Branch chosen by `symmetric`, not by the sign of h - 1, so that finite
// difference stencils stay on one side of the transition.
inline double alpha_branch(double h, double gamma, bool symmetric) {
  return symmetric ? std::sqrt((h - 1.0) / (h - gamma)) : std::sqrt((1.0 - h * h) / (1.0 - gamma));
}

inline double mu_raw(double alpha, double tau) {
  if (tau == 1.0) return 1.0;
  return std::sqrt((tau * alpha + 1.0 - tau) * (tau + alpha * (1.0 - tau)) / alpha);
}

inline double g_pp_raw(double alpha, double tau) { return 1.0 + (1.0 / alpha - 1.0) * tau; }

// Central-difference step for closed-form derivatives; shrinks near h = 1 so
// the stencil never crosses the transition.
inline double derivative_step(double h) {
  return std::min(1e-6 * std::max(1.0, h), 1e-3 * std::abs(h - 1.0));
}

template <typename F>
double central_derivative(F&& f, double h, double step) {
  return (f(h + step) - f(h - step)) / (2.0 * step);
}

}  // namespace detail

/// Mean-field rotation angle: arccos h in the broken phase, 0 otherwise.
inline double theta0(double h) {
  if (!std::isfinite(h) || h < 0.0) throw InvalidArgument("theta0: h must be finite and >= 0");
  return h <= 1.0 ? std::acos(h) : 0.0;
}

inline double alpha(double h, double gamma) {
  detail::check_field(h, gamma);
  return detail::alpha_branch(h, gamma, h > 1.0);
}

inline double mu(double alpha, double tau) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("mu: alpha must be > 0");
  detail::check_tau(tau);
  return detail::mu_raw(alpha, tau);
}

inline GreensFunctions greens(double alpha, double tau) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("greens: alpha must be > 0");
  detail::check_tau(tau);
  return {detail::g_pp_raw(alpha, tau), (1.0 - alpha) * tau - 1.0};
}

/// Global fidelity susceptibility in the thermodynamic limit; N enters only
/// the extensive broken-phase term.
inline double chi_g_analytic(double h, double gamma, int n) {
  detail::check_field(h, gamma);
  if (h > 1.0) {
    const double a = (1.0 - gamma) / ((h - gamma) * (h - 1.0));
    return a * a / 32.0;
  }
  const double one_minus_h2 = 1.0 - h * h;
  const double g = 1.0 - gamma;
  const double h2g = h * h - gamma;
  return n / (4.0 * std::sqrt(one_minus_h2 * g)) +
         h * h * h2g * h2g / (32.0 * g * g * one_minus_h2 * one_minus_h2);
}

/// Coefficient of N in chi_r: tau / (4 G++ (1 - h^2)) for h < 1, else 0.
inline double chi_r_extensive(double h, double gamma, double tau) {
  detail::check_field(h, gamma);
  detail::check_tau(tau);
  if (h > 1.0) return 0.0;
  const double a = detail::alpha_branch(h, gamma, false);
  return tau / (4.0 * detail::g_pp_raw(a, tau) * (1.0 - h * h));
}

/// N-independent part of chi_r,
///
///   chi = (d mu)^2 / (4 (mu^2 - 1)) + mu^2 / (4 (mu^2 + 1)) [d ln|mu / G++|]^2.
///
/// The first term is evaluated through mu^2 - 1 = tau (1-tau) (1-alpha)^2 / alpha,
/// which turns it into tau (1-tau) (1+alpha)^2 (d alpha)^2 / (16 mu^2 alpha^3)
/// and removes the 0/0 at tau = 1 and at alpha = 1.
inline double chi_r_intensive(double h, double gamma, double tau) {
  detail::check_field(h, gamma);
  detail::check_tau(tau);
  const bool symmetric = h > 1.0;
  const double step = detail::derivative_step(h);
  auto alpha_of = [&](double x) { return detail::alpha_branch(x, gamma, symmetric); };
  auto log_ratio = [&](double x) {
    const double a = alpha_of(x);
    return std::log(std::abs(detail::mu_raw(a, tau) / detail::g_pp_raw(a, tau)));
  };
  const double a = alpha_of(h);
  const double m = detail::mu_raw(a, tau);
  const double da = detail::central_derivative(alpha_of, h, step);
  const double dl = detail::central_derivative(log_ratio, h, step);
  const double first = tau * (1.0 - tau) * (1.0 + a) * (1.0 + a) * da * da / (16.0 * m * m * a * a * a);
  const double second = m * m / (4.0 * (m * m + 1.0)) * dl * dl;
  return first + second;
}

/// Reduced fidelity susceptibility of an M = tau N subsystem.
inline double chi_r_analytic(double h, double gamma, double tau, int n) {
  const double value = chi_r_intensive(h, gamma, tau) + n * chi_r_extensive(h, gamma, tau);
  if (!std::isfinite(value)) throw NumericalError("chi_r_analytic: non-finite" + detail::at_point(h, gamma));
  return value;
}

/// Entanglement entropy of the subsystem; the ln 2 term in the broken phase
/// accounts for the twofold degenerate ground state.
inline double entropy_analytic(double h, double gamma, double tau) {
  const double a = alpha(h, gamma);
  const double m = mu(a, tau);
  const double upper = 0.5 * (m + 1.0);
  const double lower = 0.5 * (m - 1.0);
  double s = upper * std::log(upper);
  if (lower > 0.0) s -= lower * std::log(lower);
  if (h < 1.0) s += std::numbers::ln2;
  return s;
}

/// Ground-state energy per spin as N -> infinity, (m^2 - 1 - 2 h m) / 4 with
/// m = cos(theta0) = min(h, 1). In the broken phase this is -(1 + h^2)/4.
inline double limit_energy_density(double h) {
  if (!std::isfinite(h) || h < 0.0) throw InvalidArgument("limit_energy_density: h must be >= 0");
  const double m = std::min(h, 1.0);
  return (m * m - 1.0 - 2.0 * h * m) / 4.0;
}

inline AnalyticPoint evaluate_analytic(double h, double gamma, double tau, int n) {
  AnalyticPoint pt;
  pt.h = h;
  pt.gamma = gamma;
  pt.tau = tau;
  pt.n = n;
  pt.alpha = alpha(h, gamma);
  pt.mu = mu(pt.alpha, tau);
  const auto g = greens(pt.alpha, tau);
  pt.g_pp = g.g_pp;
  pt.g_mm = g.g_mm;
  pt.varphi = std::atanh((pt.mu - pt.g_pp) / (pt.mu + pt.g_pp));
  pt.epsilon = pt.mu > 1.0 ? std::log((pt.mu + 1.0) / (pt.mu - 1.0))
                           : std::numeric_limits<double>::infinity();
  pt.theta0 = theta0(h);
  pt.chi_g = chi_g_analytic(h, gamma, n);
  pt.chi_r = chi_r_analytic(h, gamma, tau, n);
  pt.eta = pt.chi_r / pt.chi_g;
  pt.entropy = entropy_analytic(h, gamma, tau);
  return pt;
}

}  // namespace lmgfs
