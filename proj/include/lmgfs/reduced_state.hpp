#pragma once

// Reduction of a Dicke-basis ground state to an M-spin subsystem.
//
// Writing |J, -J+m> = sum_p sqrt(H(p; 2J, 2J_A, m)) |J_A, -J_A+p> |J_B, -J_B+m-p>,
// the ground state becomes sum_{p,j} A(p, j) |p>_A |j>_B with
//
//   A(p, j) = C_{p+j} sqrt(H(p; N, M, p+j)),
//
// so rho_A = A A^T. Entry-wise this is the double-hypergeometric sum over m.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "lmgfs/errors.hpp"
#include "lmgfs/hypergeometric.hpp"
#include "lmgfs/model.hpp"

namespace lmgfs {

/// Split of N spins into a subsystem of M spins and its complement.
class Bipartition {
 public:
  Bipartition(int n, int m_sub) : n_(n), m_sub_(m_sub) {
    if (n < 1 || m_sub < 1 || m_sub > n) {
      throw InvalidArgument("Bipartition: need 1 <= M <= N, got N=" + std::to_string(n) +
                            ", M=" + std::to_string(m_sub));
    }
  }

  /// M = round(tau N), clamped to [1, N].
  static Bipartition from_fraction(int n, double tau) {
    if (!std::isfinite(tau) || tau <= 0.0 || tau > 1.0) {
      throw InvalidArgument("Bipartition: tau must lie in (0, 1], got " + std::to_string(tau));
    }
    const auto m = static_cast<int>(std::lround(tau * n));
    return {n, std::clamp(m, 1, n)};
  }

  int n() const noexcept { return n_; }
  int m_sub() const noexcept { return m_sub_; }
  double tau() const noexcept { return static_cast<double>(m_sub_) / n_; }
  Bipartition complement() const { return {n_, n_ - m_sub_}; }

  friend bool operator==(const Bipartition&, const Bipartition&) = default;

 private:
  int n_;
  int m_sub_;
};

/// Real symmetric unit-trace density matrix of an M-spin subsystem, indexed
/// by p = 0..M over |J_A, -J_A + p>.
class ReducedDensity {
 public:
  static constexpr double kTraceTolerance = 1e-12;
  static constexpr double kSymmetryTolerance = 1e-12;

  explicit ReducedDensity(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1) {
      throw InvalidArgument("ReducedDensity: matrix must be square and non-empty");
    }
    if (!matrix_.allFinite()) throw NumericalError("ReducedDensity: non-finite entries");
    const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance) {
      throw NumericalError("ReducedDensity: asymmetry " + std::to_string(asym));
    }
    const double trace_error = std::abs(matrix_.trace() - 1.0);
    if (trace_error > kTraceTolerance) {
      throw NumericalError("ReducedDensity: trace error " + std::to_string(trace_error));
    }
  }

  int m_sub() const noexcept { return static_cast<int>(matrix_.rows()) - 1; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
};

/// Eigendecomposition of a density matrix with roundoff-negative eigenvalues
/// clamped to zero. Shared by entropy and fidelity evaluations.
struct DensitySpectrum {
  static constexpr double kNegativeTolerance = 1e-10;

  Eigen::VectorXd eigenvalues;   // ascending, >= 0
  Eigen::MatrixXd eigenvectors;  // columns

  explicit DensitySpectrum(const ReducedDensity& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rho.matrix());
    if (solver.info() != Eigen::Success) throw NumericalError("DensitySpectrum: eigensolver failed");
    eigenvalues = solver.eigenvalues();
    eigenvectors = solver.eigenvectors();
    const double lowest = eigenvalues.minCoeff();
    if (lowest < -kNegativeTolerance) {
      throw NumericalError("DensitySpectrum: eigenvalue " + std::to_string(lowest) +
                           " below -1e-10; matrix is not positive semidefinite");
    }
    eigenvalues = eigenvalues.cwiseMax(0.0);
  }

  /// rho^{1/2} from the clamped spectrum.
  Eigen::MatrixXd sqrt_matrix() const {
    return eigenvectors * eigenvalues.cwiseSqrt().asDiagonal() * eigenvectors.transpose();
  }
};

inline ReducedDensity reduce(const DickeGroundState& state, const Bipartition& part) {
  const int n = state.params.n();
  if (part.n() != n) {
    throw InvalidArgument("reduce: bipartition has N=" + std::to_string(part.n()) +
                          " but state has N=" + std::to_string(n));
  }
  const int m_sub = part.m_sub();
  const int rest = n - m_sub;
  const LogFactorialTable table(n);
  const auto& c = state.coefficients;

  Eigen::MatrixXd amp(m_sub + 1, rest + 1);
  for (int p = 0; p <= m_sub; ++p) {
    const double log_a = table.log_binomial(m_sub, p);
    for (int j = 0; j <= rest; ++j) {
      const int m = p + j;
      const double log_w = log_a + table.log_binomial(rest, j) - table.log_binomial(n, m);
      amp(p, j) = c[m] == 0.0 ? 0.0 : c[m] * std::exp(0.5 * log_w);
    }
  }
  Eigen::MatrixXd rho(m_sub + 1, m_sub + 1);
  rho.noalias() = amp * amp.transpose();
  rho = 0.5 * (rho + rho.transpose()).eval();
  return ReducedDensity(std::move(rho));
}

/// -sum lambda ln lambda (natural log), eigenvalues <= 1e-14 contribute 0.
inline double von_neumann_entropy(const DensitySpectrum& spectrum) {
  double s = 0.0;
  for (double lambda : spectrum.eigenvalues) {
    if (lambda > 1e-14) s -= lambda * std::log(lambda);
  }
  return std::max(s, 0.0);
}

inline double von_neumann_entropy(const ReducedDensity& rho) {
  return von_neumann_entropy(DensitySpectrum(rho));
}

}  // namespace lmgfs
