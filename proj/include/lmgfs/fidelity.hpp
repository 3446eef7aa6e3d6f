#pragma once

// Uhlmann fidelity, Bures distance and fidelity susceptibility.
//
// Two independent routes to the susceptibility chi (F = 1 - chi delta^2 / 2):
//
//  * finite difference: chi = 2 [1 - F(state(h - delta/2), state(h + delta/2))] / delta^2
//  * spectral: the Bures metric evaluated in the eigenbasis {p_n, psi_n} of rho(h),
//
//      chi = 1/4 sum_n (d p_n)^2 / p_n
//          + 1/2 sum_{n != m} (p_n - p_m)^2 / (p_n + p_m) |<psi_n|d psi_m>|^2,
//
//    with <psi_n|d rho|psi_m> = (p_m - p_n) <psi_n|d psi_m> for n != m. Both
//    terms collapse to 1/2 sum_{n,m} |<psi_n|d rho|psi_m>|^2 / (p_n + p_m),
//    which is what is summed here.

#include <Eigen/Core>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <type_traits>

#include "lmgfs/errors.hpp"
#include "lmgfs/reduced_state.hpp"

namespace lmgfs {

namespace detail {

inline void check_same_dim(const ReducedDensity& rho, const ReducedDensity& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw InvalidArgument("fidelity: dimension mismatch " + std::to_string(rho.dim()) + " vs " +
                          std::to_string(sigma.dim()));
  }
}

}  // namespace detail

/// tr sqrt(sqrt(rho) sigma sqrt(rho)), evaluated as the trace norm of
/// sqrt(rho) sqrt(sigma). The two are equal; the trace-norm form avoids
/// squaring the spectrum, which would push eigenvalues near 1e-16 up to
/// 1e-8 after the final square root. Jacobi SVD: Eigen's BDCSVD returns NaN
/// on some of these nearly rank-deficient products.
inline double uhlmann_fidelity(const DensitySpectrum& rho, const DensitySpectrum& sigma) {
  if (rho.eigenvalues.size() != sigma.eigenvalues.size()) {
    throw InvalidArgument("fidelity: dimension mismatch");
  }
  const Eigen::MatrixXd product = rho.sqrt_matrix() * sigma.sqrt_matrix();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(product);
  const double f = svd.singularValues().sum();
  if (!std::isfinite(f)) throw NumericalError("uhlmann_fidelity: non-finite result");
  return std::clamp(f, 0.0, 1.0);
}

inline double uhlmann_fidelity(const ReducedDensity& rho, const ReducedDensity& sigma) {
  detail::check_same_dim(rho, sigma);
  return uhlmann_fidelity(DensitySpectrum(rho), DensitySpectrum(sigma));
}

inline double bures_distance_sq(const ReducedDensity& rho, const ReducedDensity& sigma) {
  return 2.0 * (1.0 - uhlmann_fidelity(rho, sigma));
}

/// |<a|b>| for unit vectors.
inline double pure_fidelity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InvalidArgument("pure_fidelity: dimension mismatch");
  return std::min(std::abs(a.dot(b)), 1.0);
}

/// 1 - F for a pair of states. For unit vectors this is 1/2 |a - s b|^2 with
/// s = sign<a|b>, which is exact and free of the cancellation in 1 - |<a|b>|.
inline double infidelity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InvalidArgument("infidelity: dimension mismatch");
  const double s = a.dot(b) < 0.0 ? -1.0 : 1.0;
  return 0.5 * (a - s * b).squaredNorm();
}

inline double infidelity(const ReducedDensity& rho, const ReducedDensity& sigma) {
  return 1.0 - uhlmann_fidelity(rho, sigma);
}

/// Finite-difference fidelity susceptibility of a one-parameter family.
///
/// `state_at(h)` returns either a unit state vector or a ReducedDensity. The
/// stencil is h -/+ delta/2; if that would cross `lower_bound` the forward
/// pair (h, h + delta) is used instead.
template <typename StateAt>
double fs_finite_difference(StateAt&& state_at, double h, double delta, double lower_bound = 0.0) {
  auto fail = [&](const std::string& what) {
    std::ostringstream os;
    os.precision(17);
    os << "fs_finite_difference: " << what << " at h=" << h << ", delta=" << delta;
    return os.str();
  };
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument(fail("delta must be > 0"));
  if (!std::isfinite(h) || h < lower_bound) throw InvalidArgument(fail("h outside the domain"));

  double lo = h - 0.5 * delta;
  double hi = h + 0.5 * delta;
  if (lo < lower_bound) {
    lo = h;
    hi = h + delta;
  }
  const double one_minus_f = infidelity(state_at(lo), state_at(hi));
  const double chi = 2.0 * one_minus_f / (delta * delta);
  if (!std::isfinite(chi)) throw NumericalError(fail("non-finite susceptibility"));
  return chi;
}

struct SpectralOptions {
  /// Terms with p_n + p_m <= 2 * support_cutoff are dropped. Below this the
  /// O(delta^2) error in d rho, amplified by 1/p, outweighs what the mode
  /// carries. Small modes above it still matter: in the broken phase a pair
  /// near 5e-10 holds about 1% of chi_r at N=64.
  double support_cutoff = 1e-12;
};

/// Spectral susceptibility from the eigendecomposition of rho(h) and a
/// derivative estimate d rho / dh.
inline double fs_spectral_from_derivative(const DensitySpectrum& spectrum,
                                          const Eigen::MatrixXd& drho,
                                          const SpectralOptions& options = {}) {
  const auto dim = spectrum.eigenvalues.size();
  if (drho.rows() != dim || drho.cols() != dim) {
    throw InvalidArgument("fs_spectral: derivative has the wrong shape");
  }
  const Eigen::MatrixXd rotated = spectrum.eigenvectors.transpose() * drho * spectrum.eigenvectors;
  const auto& p = spectrum.eigenvalues;
  const double floor = 2.0 * options.support_cutoff;
  double chi = 0.0;
  for (Eigen::Index n = 0; n < dim; ++n) {
    for (Eigen::Index m = 0; m < dim; ++m) {
      const double weight = p[n] + p[m];
      if (weight <= floor) continue;
      chi += 0.5 * rotated(n, m) * rotated(n, m) / weight;
    }
  }
  if (!std::isfinite(chi)) throw NumericalError("fs_spectral: non-finite susceptibility");
  return chi;
}

/// Spectral susceptibility with d rho ~ (rho_plus - rho_minus) / (2 delta).
inline double fs_spectral(const ReducedDensity& rho_minus, const ReducedDensity& rho,
                          const ReducedDensity& rho_plus, double delta,
                          const SpectralOptions& options = {}) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("fs_spectral: delta must be > 0");
  detail::check_same_dim(rho_minus, rho);
  detail::check_same_dim(rho_plus, rho);
  const Eigen::MatrixXd drho = (rho_plus.matrix() - rho_minus.matrix()) / (2.0 * delta);
  return fs_spectral_from_derivative(DensitySpectrum(rho), drho, options);
}

namespace detail {

inline Eigen::VectorXd aligned(const Eigen::VectorXd& v, const Eigen::VectorXd& reference) {
  return v.dot(reference) < 0.0 ? Eigen::VectorXd(-v) : v;
}

}  // namespace detail

/// Pure-state limit of the spectral formula, chi = |d psi|^2 - <psi|d psi>^2,
/// with d psi ~ (psi_plus - psi_minus) / (h_plus - h_minus) after aligning the
/// sign gauge of the neighbours to psi.
inline double fs_spectral_pure(const Eigen::VectorXd& psi_minus, const Eigen::VectorXd& psi,
                               const Eigen::VectorXd& psi_plus, double step) {
  if (!(step > 0.0)) throw InvalidArgument("fs_spectral_pure: step must be > 0");
  const Eigen::VectorXd d = (detail::aligned(psi_plus, psi) - detail::aligned(psi_minus, psi)) / step;
  const double along = psi.dot(d);
  const double chi = d.squaredNorm() - along * along;
  if (!std::isfinite(chi)) throw NumericalError("fs_spectral_pure: non-finite susceptibility");
  return std::max(chi, 0.0);
}

}  // namespace lmgfs
