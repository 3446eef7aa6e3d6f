#pragma once

// Grid evaluation: one SweepPoint per (N, h, tau, method). Points are
// independent; `sweep` dispatches them to a pool of worker threads and sorts
// the collected rows, so the output does not depend on scheduling.

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "lmgfs/analytic.hpp"
#include "lmgfs/errors.hpp"
#include "lmgfs/fidelity.hpp"
#include "lmgfs/model.hpp"
#include "lmgfs/reduced_state.hpp"

namespace lmgfs {

enum class Method { finite_difference, spectral, analytic };

inline std::string_view to_string(Method method) {
  switch (method) {
    case Method::finite_difference: return "finite-difference";
    case Method::spectral: return "spectral";
    case Method::analytic: return "analytic";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view text) {
  if (text == "finite-difference" || text == "fd") return Method::finite_difference;
  if (text == "spectral") return Method::spectral;
  if (text == "analytic") return Method::analytic;
  return std::nullopt;
}

enum class PointStatus { ok, step_drift, singular, unsupported, failed };

inline std::string_view to_string(PointStatus status) {
  switch (status) {
    case PointStatus::ok: return "ok";
    case PointStatus::step_drift: return "step-drift";
    case PointStatus::singular: return "singular";
    case PointStatus::unsupported: return "unsupported";
    case PointStatus::failed: return "failed";
  }
  return "unknown";
}

/// One location in parameter space; M is resolved, the requested fraction is
/// kept for reporting.
struct GridPoint {
  int n = 0;
  int m_sub = 0;
  double h = 0.0;
  double tau_requested = 0.0;
};

struct SweepSettings {
  double gamma = 0.5;
  std::optional<double> delta;  // empty: default_fd_step / default_spectral_step
  std::vector<Method> methods{Method::finite_difference};
  bool skip_errors = false;
  unsigned jobs = 0;  // 0: std::thread::hardware_concurrency()
  bool probe_step = true;
  double drift_tolerance = 1e-3;
  SpectralOptions spectral;
};

struct SweepPoint {
  static constexpr double kEtaSlack = 1e-6;

  double h = 0.0;
  int n = 0;
  int m_sub = 0;
  double tau = 0.0;
  double tau_requested = 0.0;
  double delta = 0.0;
  double chi_g = std::numeric_limits<double>::quiet_NaN();
  double chi_r = std::numeric_limits<double>::quiet_NaN();
  double eta = std::numeric_limits<double>::quiet_NaN();
  double entropy = std::numeric_limits<double>::quiet_NaN();
  Method method = Method::finite_difference;
  PointStatus status = PointStatus::ok;
  std::string message;

  bool computed() const noexcept {
    return status == PointStatus::ok || status == PointStatus::step_drift;
  }

  /// chi_g >= 0, chi_r >= 0, 0 <= eta <= 1 + 1e-6, all finite.
  bool satisfies_invariants() const noexcept {
    return std::isfinite(chi_g) && std::isfinite(chi_r) && std::isfinite(eta) && std::isfinite(entropy) &&
           chi_g >= 0.0 && chi_r >= 0.0 && eta >= 0.0 && eta <= 1.0 + kEtaSlack;
  }
};

inline double default_fd_step(double h) { return 1e-3 * std::max(1.0, std::abs(h)); }
inline double default_spectral_step(double h) { return 1e-4 * std::max(1.0, std::abs(h)); }

/// Grid over sizes and fields at a fixed requested fraction tau.
inline std::vector<GridPoint> make_grid(std::span<const int> sizes, double tau, std::span<const double> fields) {
  std::vector<GridPoint> grid;
  grid.reserve(sizes.size() * fields.size());
  for (int n : sizes) {
    const auto part = Bipartition::from_fraction(n, tau);
    for (double h : fields) grid.push_back({n, part.m_sub(), h, tau});
  }
  return grid;
}

namespace detail {

// Ground states and reductions keyed by h, computed on demand.
class StateCache {
 public:
  StateCache(int n, double gamma, Bipartition part) : n_(n), gamma_(gamma), part_(part) {}

  const DickeGroundState& state(double h) {
    auto it = states_.find(h);
    if (it == states_.end()) it = states_.emplace(h, ground_state(ModelParams(n_, gamma_, h))).first;
    return it->second;
  }

  const ReducedDensity& rho(double h) {
    auto it = rhos_.find(h);
    if (it == rhos_.end()) it = rhos_.emplace(h, reduce(state(h), part_)).first;
    return it->second;
  }

 private:
  int n_;
  double gamma_;
  Bipartition part_;
  std::map<double, DickeGroundState> states_;
  std::map<double, ReducedDensity> rhos_;
};

inline double ratio(double chi_r, double chi_g) {
  if (chi_g > 0.0) return chi_r / chi_g;
  return chi_r == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

// Numeric rows that break an invariant are marked failed. The closed forms
// are only asymptotic and give eta > 1 just below h = 1 at finite N, so
// analytic rows are annotated instead.
inline void enforce_invariants(SweepPoint& row) {
  if (!row.computed() || row.satisfies_invariants()) return;
  std::ostringstream os;
  os.precision(17);
  os << "invariant violated: chi_g=" << row.chi_g << " chi_r=" << row.chi_r << " eta=" << row.eta;
  if (row.method != Method::analytic) row.status = PointStatus::failed;
  row.message = os.str();
}

}  // namespace detail

/// Evaluates every requested method at one grid point. Numerical failures
/// propagate as exceptions; singular or unsupported analytic points are
/// returned as flagged rows.
inline std::vector<SweepPoint> evaluate_point(const GridPoint& point, const SweepSettings& settings) {
  const ModelParams params(point.n, settings.gamma, point.h);
  const Bipartition part(point.n, point.m_sub);
  detail::StateCache cache(point.n, settings.gamma, part);

  SweepPoint base;
  base.h = point.h;
  base.n = point.n;
  base.m_sub = point.m_sub;
  base.tau = part.tau();
  base.tau_requested = point.tau_requested;

  std::optional<DensitySpectrum> center;
  auto center_spectrum = [&]() -> const DensitySpectrum& {
    if (!center) center.emplace(cache.rho(point.h));
    return *center;
  };

  auto fd_pair = [&](double delta) {
    auto pure = [&](double x) -> const Eigen::VectorXd& { return cache.state(x).coefficients; };
    auto mixed = [&](double x) -> const ReducedDensity& { return cache.rho(x); };
    return std::pair{fs_finite_difference(pure, point.h, delta), fs_finite_difference(mixed, point.h, delta)};
  };

  std::vector<SweepPoint> rows;
  for (Method method : settings.methods) {
    SweepPoint row = base;
    row.method = method;
    switch (method) {
      case Method::finite_difference: {
        row.delta = settings.delta.value_or(default_fd_step(point.h));
        std::tie(row.chi_g, row.chi_r) = fd_pair(row.delta);
        row.entropy = von_neumann_entropy(center_spectrum());
        if (settings.probe_step && !settings.delta) {
          const auto [g2, r2] = fd_pair(0.5 * row.delta);
          auto drift = [](double a, double b) { return a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
          const double worst = std::max(drift(row.chi_g, g2), drift(row.chi_r, r2));
          if (worst > settings.drift_tolerance) {
            row.status = PointStatus::step_drift;
            row.message = "halving delta moves chi by " + std::to_string(worst);
          }
        }
        break;
      }
      case Method::spectral: {
        const double step = settings.delta.value_or(default_spectral_step(point.h));
        row.delta = step;
        const double lo = point.h - step >= 0.0 ? point.h - step : point.h;
        const double hi = point.h + step;
        const Eigen::MatrixXd drho = (cache.rho(hi).matrix() - cache.rho(lo).matrix()) / (hi - lo);
        row.chi_r = fs_spectral_from_derivative(center_spectrum(), drho, settings.spectral);
        row.chi_g = fs_spectral_pure(cache.state(lo).coefficients, cache.state(point.h).coefficients,
                                     cache.state(hi).coefficients, hi - lo);
        row.entropy = von_neumann_entropy(center_spectrum());
        break;
      }
      case Method::analytic: {
        try {
          const auto a = evaluate_analytic(point.h, settings.gamma, part.tau(), point.n);
          row.chi_g = a.chi_g;
          row.chi_r = a.chi_r;
          row.entropy = a.entropy;
        } catch (const SingularPoint& e) {
          row.status = PointStatus::singular;
          row.message = e.what();
        } catch (const InvalidArgument& e) {
          row.status = PointStatus::unsupported;
          row.message = e.what();
        }
        break;
      }
    }
    if (row.computed()) row.eta = detail::ratio(row.chi_r, row.chi_g);
    detail::enforce_invariants(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Calls fn(i) for i in [0, count) on up to `jobs` threads. The first
/// exception stops the dispatch of new indices and is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

/// Orders rows by (N, h, tau, method).
inline void sort_rows(std::vector<SweepPoint>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepPoint& a, const SweepPoint& b) {
    return std::tuple(a.n, a.h, a.tau, static_cast<int>(a.method)) <
           std::tuple(b.n, b.h, b.tau, static_cast<int>(b.method));
  });
}

/// Evaluates the grid. A numerical failure aborts with the point's context
/// unless `skip_errors` is set, in which case the point is recorded as failed.
inline std::vector<SweepPoint> sweep(std::span<const GridPoint> grid, const SweepSettings& settings) {
  std::vector<std::vector<SweepPoint>> per_point(grid.size());
  parallel_for(grid.size(), settings.jobs, [&](std::size_t i) {
    const GridPoint& point = grid[i];
    try {
      per_point[i] = evaluate_point(point, settings);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os.precision(17);
      os << "point (N=" << point.n << ", M=" << point.m_sub << ", h=" << point.h << "): " << e.what();
      if (!settings.skip_errors) throw NumericalError(os.str());
      for (Method method : settings.methods) {
        SweepPoint row;
        row.h = point.h;
        row.n = point.n;
        row.m_sub = point.m_sub;
        row.tau = point.n > 0 ? static_cast<double>(point.m_sub) / point.n : 0.0;
        row.tau_requested = point.tau_requested;
        row.method = method;
        row.status = PointStatus::failed;
        row.message = os.str();
        per_point[i].push_back(std::move(row));
      }
    }
  });
  std::vector<SweepPoint> rows;
  for (auto& chunk : per_point) {
    for (auto& row : chunk) rows.push_back(std::move(row));
  }
  sort_rows(rows);
  return rows;
}

}  // namespace lmgfs
