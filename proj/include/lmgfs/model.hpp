#pragma once

// Lipkin-Meshkov-Glick Hamiltonian
//
//   H = -(1/N) (Sx^2 + gamma Sy^2) - h Sz
//
// restricted to the maximal-spin sector J = N/2. States |J, m> are indexed by
// the integer offset k = m + J in [0, N]. Using
//
//   Sx^2 + gamma Sy^2 = (1-gamma)/4 (S+^2 + S-^2) + (1+gamma)/2 (S^2 - Sz^2)
//
// the matrix is real symmetric with bands only at offsets 0 and +-2, so the
// even-k and odd-k sublattices decouple into two tridiagonal blocks.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "lmgfs/errors.hpp"
#include "lmgfs/tridiagonal.hpp"

namespace lmgfs {

/// One Hamiltonian instance (N, gamma, h); the coupling strength is fixed to 1.
class ModelParams {
 public:
  ModelParams(int n, double gamma, double h) : n_(n), gamma_(gamma), h_(h) {
    if (n < 2) throw InvalidArgument("ModelParams: N must be >= 2, got " + std::to_string(n));
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma > 1.0) {
      throw InvalidArgument("ModelParams: gamma must lie in [0, 1], got " + std::to_string(gamma));
    }
    if (!std::isfinite(h) || h < 0.0) {
      throw InvalidArgument("ModelParams: h must be finite and >= 0, got " + std::to_string(h));
    }
  }

  int n() const noexcept { return n_; }
  double gamma() const noexcept { return gamma_; }
  double h() const noexcept { return h_; }
  double total_spin() const noexcept { return 0.5 * n_; }

  ModelParams with_h(double h) const { return {n_, gamma_, h}; }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "(N=" << n_ << ", gamma=" << gamma_ << ", h=" << h_ << ")";
    return os.str();
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  int n_;
  double gamma_;
  double h_;
};

/// Banded form of the Hamiltonian in the Dicke basis |J, -J + k>, k = 0..N.
struct BandedHamiltonian {
  Eigen::VectorXd diagonal;        // length N+1
  Eigen::VectorXd superdiagonal2;  // length N-1, entry k couples k <-> k+2

  Eigen::Index dim() const noexcept { return diagonal.size(); }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(dim(), dim());
    dense.diagonal() = diagonal;
    for (Eigen::Index k = 0; k < superdiagonal2.size(); ++k) {
      dense(k, k + 2) = superdiagonal2[k];
      dense(k + 2, k) = superdiagonal2[k];
    }
    return dense;
  }

  /// Infinity norm (max absolute row sum).
  double norm_inf() const {
    double best = 0.0;
    for (Eigen::Index k = 0; k < dim(); ++k) {
      double row = std::abs(diagonal[k]);
      if (k >= 2) row += std::abs(superdiagonal2[k - 2]);
      if (k < superdiagonal2.size()) row += std::abs(superdiagonal2[k]);
      best = std::max(best, row);
    }
    return best;
  }

  /// Tridiagonal block on the sublattice k = parity, parity + 2, ...
  std::pair<Eigen::VectorXd, Eigen::VectorXd> parity_block(int parity) const {
    const Eigen::Index size = (dim() - parity + 1) / 2;
    Eigen::VectorXd d(size);
    Eigen::VectorXd e(std::max<Eigen::Index>(size - 1, 0));
    for (Eigen::Index i = 0; i < size; ++i) {
      const Eigen::Index k = parity + 2 * i;
      d[i] = diagonal[k];
      if (i + 1 < size) e[i] = superdiagonal2[k];
    }
    return {std::move(d), std::move(e)};
  }
};

namespace detail {

// No domain checks; lets tests probe h < 0 and other off-domain points.
inline BandedHamiltonian hamiltonian_bands(int n, double gamma, double h) {
  const double j = 0.5 * n;
  const double jj = j * (j + 1.0);
  BandedHamiltonian ham;
  ham.diagonal.resize(n + 1);
  ham.superdiagonal2.resize(std::max(n - 1, 0));
  for (int k = 0; k <= n; ++k) {
    const double m = k - j;
    ham.diagonal[k] = -(1.0 + gamma) / (2.0 * n) * (jj - m * m) - h * m;
  }
  for (int k = 0; k + 2 <= n; ++k) {
    const double m = k - j;
    const double a = jj - m * (m + 1.0);
    const double b = jj - (m + 1.0) * (m + 2.0);
    ham.superdiagonal2[k] = -(1.0 - gamma) / (4.0 * n) * std::sqrt(a * b);
  }
  return ham;
}

}  // namespace detail

inline BandedHamiltonian build_hamiltonian(const ModelParams& params) {
  return detail::hamiltonian_bands(params.n(), params.gamma(), params.h());
}

/// Ground state expanded over |J, -J + k>.
struct DickeGroundState {
  ModelParams params;
  Eigen::VectorXd coefficients;
  double energy = 0.0;
  int parity = 0;  // k-sublattice carrying the support
};

/// Lowest eigenpair of the Hamiltonian.
///
/// Each parity block is solved separately so that the returned vector always
/// lives on a single sublattice, even when the two blocks are degenerate to
/// machine precision (broken phase, large N). On such ties the block holding
/// the fully polarized state |J, J> is kept, which makes the family of states
/// continuous in h. A sign gauge is applied: the first coefficient with
/// magnitude above 1e-12 is positive.
inline DickeGroundState ground_state(const ModelParams& params) {
  const auto ham = build_hamiltonian(params);
  const double norm = ham.norm_inf();
  const int preferred = params.n() % 2;

  auto solve = [&](int parity) {
    auto [d, e] = ham.parity_block(parity);
    return lowest_tridiagonal_eigenpair(d, e);
  };

  Eigenpair best = solve(preferred);
  int parity = preferred;
  Eigenpair other = solve(1 - preferred);
  if (other.value < best.value - 1e-12 * std::max(1.0, norm)) {
    best = std::move(other);
    parity = 1 - preferred;
  }

  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(ham.dim());
  for (Eigen::Index i = 0; i < best.vector.size(); ++i) coeffs[parity + 2 * i] = best.vector[i];
  coeffs.normalize();

  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    if (std::abs(coeffs[k]) > 1e-12) {
      if (coeffs[k] < 0.0) coeffs = -coeffs;
      break;
    }
  }

  // Residual gate: ||H v - E v|| <= 1e-10 ||H||.
  Eigen::VectorXd hv = ham.diagonal.cwiseProduct(coeffs);
  for (Eigen::Index k = 0; k < ham.superdiagonal2.size(); ++k) {
    hv[k] += ham.superdiagonal2[k] * coeffs[k + 2];
    hv[k + 2] += ham.superdiagonal2[k] * coeffs[k];
  }
  const double residual = (hv - best.value * coeffs).norm();
  if (!std::isfinite(residual) || residual > 1e-10 * std::max(1.0, norm)) {
    throw NumericalError("ground_state: eigensolver residual " + std::to_string(residual) +
                         " too large at " + params.describe());
  }

  return {params, std::move(coeffs), best.value, parity};
}

inline double energy_density(const DickeGroundState& state) {
  return state.energy / state.params.n();
}

}  // namespace lmgfs
