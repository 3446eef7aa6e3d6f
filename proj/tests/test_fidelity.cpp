#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <random>

#include "lmgfs/fidelity.hpp"
#include "lmgfs/model.hpp"

using namespace lmgfs;

namespace {

ReducedDensity diag2(double a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = 1.0 - a;
  return ReducedDensity(m);
}

ReducedDensity random_density(std::mt19937& rng, int dim, int rank) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(dim, rank);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  Eigen::MatrixXd rho = a * a.transpose();
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.transpose()).eval();
  return ReducedDensity(rho);
}

// F = sum_i sqrt(lambda_i(rho sigma)); rho sigma is similar to
// sqrt(rho) sigma sqrt(rho), so its eigenvalues are real and >= 0.
double fidelity_oracle(const ReducedDensity& rho, const ReducedDensity& sigma) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(rho.matrix() * sigma.matrix(), false);
  double f = 0.0;
  for (const auto& lambda : solver.eigenvalues()) f += std::sqrt(std::max(lambda.real(), 0.0));
  return f;
}

}  // namespace

TEST(Uhlmann, SelfFidelityIsOne) {
  std::mt19937 rng(7);
  for (int dim : {1, 2, 5, 20}) {
    const auto rho = random_density(rng, dim, dim);
    EXPECT_NEAR(uhlmann_fidelity(rho, rho), 1.0, 1e-12);
  }
}

TEST(Uhlmann, DiagonalPair) {
  // sqrt(0.45) + sqrt(0.05)
  EXPECT_NEAR(uhlmann_fidelity(diag2(0.5), diag2(0.9)), 0.894427190999916, 1e-12);
  EXPECT_NEAR(bures_distance_sq(diag2(0.5), diag2(0.9)), 0.211145618000168, 1e-12);
}

TEST(Uhlmann, OrthogonalStatesHaveZeroFidelity) {
  EXPECT_NEAR(uhlmann_fidelity(diag2(1.0), diag2(0.0)), 0.0, 1e-15);
}

TEST(Uhlmann, AgreesWithEigenvalueOracle) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 2 + trial % 9;
    const auto rho = random_density(rng, dim, dim);
    const auto sigma = random_density(rng, dim, dim);
    EXPECT_NEAR(uhlmann_fidelity(rho, sigma), fidelity_oracle(rho, sigma), 1e-10);
  }
}

TEST(Uhlmann, SymmetricBoundedAndMonotoneUnderMixing) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 2 + trial % 7;
    const auto rho = random_density(rng, dim, 1 + trial % dim);
    const auto sigma = random_density(rng, dim, dim);
    const double f = uhlmann_fidelity(rho, sigma);
    EXPECT_NEAR(f, uhlmann_fidelity(sigma, rho), 1e-10);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
    // Concavity in the second argument.
    const ReducedDensity mix(0.5 * (rho.matrix() + sigma.matrix()));
    EXPECT_GE(uhlmann_fidelity(rho, mix), 0.5 * (f + 1.0) - 1e-10);
  }
}

TEST(Uhlmann, PureStatesReduceToOverlap) {
  std::mt19937 rng(17);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a(6), b(6);
    for (int i = 0; i < 6; ++i) {
      a[i] = normal(rng);
      b[i] = normal(rng);
    }
    a.normalize();
    b.normalize();
    const ReducedDensity ra(a * a.transpose()), rb(b * b.transpose());
    EXPECT_NEAR(uhlmann_fidelity(ra, rb), pure_fidelity(a, b), 1e-7);
    EXPECT_NEAR(infidelity(a, b), 1.0 - pure_fidelity(a, b), 1e-14);
  }
}

TEST(Uhlmann, DimensionMismatchThrows) {
  EXPECT_THROW(uhlmann_fidelity(diag2(0.5), ReducedDensity(Eigen::MatrixXd::Identity(3, 3) / 3.0)),
               InvalidArgument);
  EXPECT_THROW(pure_fidelity(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)), InvalidArgument);
}

TEST(FiniteDifference, ConstantFamilyHasZeroSusceptibility) {
  const auto rho = diag2(0.3);
  EXPECT_EQ(fs_finite_difference([&](double) -> const ReducedDensity& { return rho; }, 0.7, 1e-3), 0.0);
}

TEST(FiniteDifference, ClassicalTwoLevelFamily) {
  // rho(h) = diag(h, 1 - h): chi = 1/4 (1/h + 1/(1-h)), = 1 at h = 1/2.
  for (double delta : {1e-2, 1e-3}) {
    EXPECT_NEAR(fs_finite_difference(diag2, 0.5, delta), 1.0, 1e-4);
  }
  EXPECT_NEAR(fs_finite_difference(diag2, 0.2, 1e-3), 0.25 * (5.0 + 1.25), 1e-5);
}

TEST(FiniteDifference, ForwardStencilNearBoundary) {
  // lo = h - delta/2 < 0, so the pair (h, h + delta) is used.
  auto family = [](double t) { return diag2(0.5 + 0.4 * std::tanh(t)); };
  const double chi = fs_finite_difference(family, 1e-5, 1e-3);
  EXPECT_NEAR(chi, 0.16, 1e-3);  // (0.4)^2 / (4 * 0.25)
  EXPECT_THROW(fs_finite_difference(family, -1.0, 1e-3), InvalidArgument);
  EXPECT_THROW(fs_finite_difference(family, 0.5, 0.0), InvalidArgument);
}

TEST(Spectral, ClassicalTwoLevelFamily) {
  EXPECT_NEAR(fs_spectral(diag2(0.5 - 1e-4), diag2(0.5), diag2(0.5 + 1e-4), 1e-4), 1.0, 1e-12);
}

TEST(Spectral, RotatingPureQubitMatchesPureFormula) {
  // |psi(t)> = (cos t, sin t) has chi = 1.
  auto psi = [](double t) { return Eigen::Vector2d(std::cos(t), std::sin(t)).eval(); };
  auto rho = [&](double t) { return ReducedDensity(psi(t) * psi(t).transpose()); };
  const double t = 0.3, d = 1e-4;
  EXPECT_NEAR(fs_spectral(rho(t - d), rho(t), rho(t + d), d), 1.0, 1e-7);
  EXPECT_NEAR(fs_spectral_pure(psi(t - d), psi(t), -psi(t + d), 2 * d), 1.0, 1e-7);
}

TEST(Spectral, MixedRotationMatchesClosedForm) {
  // rho(t) = R(t) diag(p, 1-p) R(t)^T: only the coherence term contributes,
  // chi = (p - q)^2 / (p + q) * |<0|d1>|^2 = (2p - 1)^2.
  const double p = 0.8;
  auto rho = [&](double t) {
    Eigen::Matrix2d r;
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return ReducedDensity(r * Eigen::Vector2d(p, 1 - p).asDiagonal() * r.transpose());
  };
  const double expected = (2 * p - 1) * (2 * p - 1);
  EXPECT_NEAR(fs_spectral(rho(0.4 - 1e-4), rho(0.4), rho(0.4 + 1e-4), 1e-4), expected, 1e-7);
  EXPECT_NEAR(fs_finite_difference(rho, 0.4, 1e-3), expected, 1e-6);
}

TEST(LmgFamily, StepHalvingIsStable) {
  const int n = 256;
  auto state = [&](double h) { return ground_state(ModelParams(n, 0.5, h)).coefficients; };
  auto rho = [&](double h) { return reduce(ground_state(ModelParams(n, 0.5, h)), Bipartition(n, n / 2)); };
  for (double h : {0.6, 1.5}) {
    const double g1 = fs_finite_difference(state, h, 1e-3), g2 = fs_finite_difference(state, h, 5e-4);
    const double r1 = fs_finite_difference(rho, h, 1e-3), r2 = fs_finite_difference(rho, h, 5e-4);
    EXPECT_LT(std::abs(g1 - g2) / g2, 1e-4) << "h=" << h;
    EXPECT_LT(std::abs(r1 - r2) / r2, 1e-4) << "h=" << h;
  }
}

TEST(LmgFamily, SpectralAgreesWithFiniteDifference) {
  const int n = 256;
  const double d = 1e-4;
  for (double h : {0.4, 1.5}) {
    auto rho = [&](double x) { return reduce(ground_state(ModelParams(n, 0.5, x)), Bipartition(n, n / 2)); };
    auto psi = [&](double x) { return ground_state(ModelParams(n, 0.5, x)).coefficients; };
    const double spectral = fs_spectral(rho(h - d), rho(h), rho(h + d), d);
    const double fd = fs_finite_difference(rho, h, 1e-3);
    EXPECT_NEAR(spectral / fd, 1.0, 1e-3) << "h=" << h;
    const double pure = fs_spectral_pure(psi(h - d), psi(h), psi(h + d), 2 * d);
    EXPECT_NEAR(pure / fs_finite_difference(psi, h, 1e-3), 1.0, 1e-3) << "h=" << h;
  }
}

// Eigenvalues near 5e-10 carry about 1% of chi_r here. The default cutoff
// keeps them; the reference is a much smaller step with no cutoff.
TEST(LmgFamily, SpectralKeepsSmallModes) {
  const int n = 64;
  const double h = 0.69598;
  auto rho = [&](double x) { return reduce(ground_state(ModelParams(n, 0.5, x)), Bipartition(n, n / 2)); };
  SpectralOptions none;
  none.support_cutoff = 0.0;
  const double reference = fs_spectral(rho(h - 1e-6), rho(h), rho(h + 1e-6), 1e-6, none);
  const double spectral = fs_spectral(rho(h - 1e-4), rho(h), rho(h + 1e-4), 1e-4);
  EXPECT_NEAR(spectral / reference, 1.0, 1e-3);
  SpectralOptions coarse;
  coarse.support_cutoff = 1e-8;
  EXPECT_LT(fs_spectral(rho(h - 1e-4), rho(h), rho(h + 1e-4), 1e-4, coarse) / reference, 0.995);
}

// Strongly polarized state: rho_1 = diag(1 - p, p) by parity, with p the mean
// flip fraction, so chi_r(M=1) = p'^2 / (4 p (1 - p)). Flips enter in pairs,
// which makes chi_g = N chi_r / 2 rather than N chi_r.
TEST(LmgFamily, PolarizedSingleSpin) {
  const int n = 256;
  auto state = [&](double x) { return ground_state(ModelParams(n, 0.5, x)).coefficients; };
  auto flip = [&](double x) {
    const Eigen::VectorXd c = state(x);
    double p = 0.0;
    for (int m = 0; m <= n; ++m) p += c[m] * c[m] * (n - m) / n;
    return p;
  };
  for (double h : {10.0, 100.0}) {
    const double d = 1e-4 * h;
    auto rho = [&](double x) { return reduce(ground_state(ModelParams(n, 0.5, x)), Bipartition(n, 1)); };
    const double chi_r = fs_spectral(rho(h - d), rho(h), rho(h + d), d);
    const double p = flip(h), dp = (flip(h + d) - flip(h - d)) / (2 * d);
    EXPECT_NEAR(chi_r / (dp * dp / (4 * p * (1 - p))), 1.0, 1e-6) << "h=" << h;
    const double chi_g = fs_spectral_pure(state(h - d), state(h), state(h + d), 2 * d);
    EXPECT_NEAR(chi_g / (n * chi_r), 0.5, 1e-3) << "h=" << h;
  }
}
