#pragma once

#include <lapacke.h>

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

#include "lmgfs/errors.hpp"

namespace lmgfs {

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

/// Lowest eigenpair of the real symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal (size n and n-1). Uses LAPACK's MRRR driver
/// restricted to the first index, so the cost is O(n).
inline Eigenpair lowest_tridiagonal_eigenpair(const Eigen::VectorXd& diagonal,
                                              const Eigen::VectorXd& offdiagonal) {
  const auto n = static_cast<lapack_int>(diagonal.size());
  if (n == 0) throw InvalidArgument("lowest_tridiagonal_eigenpair: empty matrix");
  if (offdiagonal.size() != n - 1) {
    throw InvalidArgument("lowest_tridiagonal_eigenpair: off-diagonal must have n-1 entries");
  }
  if (n == 1) return {diagonal[0], Eigen::VectorXd::Ones(1)};

  std::vector<double> d(diagonal.data(), diagonal.data() + n);
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  for (lapack_int i = 0; i + 1 < n; ++i) e[static_cast<std::size_t>(i)] = offdiagonal[i];

  lapack_int found = 0;
  double w[1];
  Eigen::VectorXd z(n);
  lapack_int isuppz[2];
  const lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, 1, 0.0,
                     &found, w, z.data(), n, isuppz);
  if (info != 0 || found != 1) {
    throw NumericalError("dstevr failed (info=" + std::to_string(info) + ")");
  }
  return {w[0], std::move(z)};
}

}  // namespace lmgfs
