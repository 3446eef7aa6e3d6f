#pragma once

// Resolved run configuration for the command-line driver and the grid it
// expands to.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lmgfs/errors.hpp"
#include "lmgfs/reduced_state.hpp"
#include "lmgfs/scaling.hpp"
#include "lmgfs/sweep.hpp"

namespace lmgfs::cli {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kNumerical = 3 };

/// Thrown for invalid user input; maps to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Command { sweep_h, sweep_tau, compare, peak_scan };

inline std::string command_name(Command c) {
  switch (c) {
    case Command::sweep_h: return "sweep-h";
    case Command::sweep_tau: return "sweep-tau";
    case Command::compare: return "compare";
    case Command::peak_scan: return "peak-scan";
  }
  return "unknown";
}

// File stem for outputs of a command.
inline std::string command_stem(Command c) {
  std::string s = command_name(c);
  for (char& ch : s) {
    if (ch == '-') ch = '_';
  }
  return s;
}

struct Range {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
};

struct SweepConfig {
  Command command = Command::sweep_h;
  double gamma = 0.5;
  double tau = 0.5;
  std::optional<int> m_sub;  // explicit M overrides tau
  std::vector<int> n_list{64, 128, 256, 512};
  Range h_range{0.5, 1.5, 200};
  std::vector<double> h_list;  // overrides h_range when non-empty
  Range tau_range{0.05, 1.0, 20};
  std::vector<double> tau_list;
  std::optional<double> delta;  // empty: auto
  std::vector<Method> methods;
  std::string out = ".";
  std::set<std::string> formats{"csv"};
  unsigned jobs = 0;
  bool skip_errors = false;
  bool check = false;
};

inline std::vector<double> expand(const Range& r, const std::vector<double>& list) {
  if (!list.empty()) return list;
  if (r.count <= 0) return {};
  return linspace(r.start, r.stop, static_cast<std::size_t>(r.count));
}

inline std::vector<double> h_values(const SweepConfig& c) { return expand(c.h_range, c.h_list); }
inline std::vector<double> tau_values(const SweepConfig& c) { return expand(c.tau_range, c.tau_list); }

inline void require_increasing(const std::vector<double>& v, const std::string& what) {
  if (v.empty()) throw UsageError(what + " grid is empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw UsageError(what + " grid must be strictly increasing");
  }
}

inline void validate(const SweepConfig& c) {
  if (!std::isfinite(c.gamma) || c.gamma < 0.0 || c.gamma > 1.0) throw UsageError("--gamma must lie in [0, 1]");
  if (c.n_list.empty()) throw UsageError("need at least one --n");
  for (int n : c.n_list) {
    if (n < 2) throw UsageError("every N must be >= 2");
    if (c.m_sub && *c.m_sub > n) throw UsageError("--m exceeds N=" + std::to_string(n));
  }
  if (c.m_sub && *c.m_sub < 1) throw UsageError("--m must be >= 1");
  const auto hs = h_values(c);
  require_increasing(hs, "h");
  for (double h : hs) {
    if (!std::isfinite(h) || h < 0.0) throw UsageError("h values must be finite and >= 0");
  }
  if (c.command == Command::sweep_tau) {
    const auto taus = tau_values(c);
    require_increasing(taus, "tau");
    for (double t : taus) {
      if (!(t > 0.0 && t <= 1.0)) throw UsageError("tau values must lie in (0, 1]");
    }
  } else if (!c.m_sub && !(c.tau > 0.0 && c.tau <= 1.0)) {
    throw UsageError("--tau must lie in (0, 1]");
  }
  if (c.delta && !(*c.delta > 0.0 && std::isfinite(*c.delta))) throw UsageError("--delta must be > 0 or auto");
  if (c.methods.empty()) throw UsageError("no methods selected");
  const bool has_analytic = std::count(c.methods.begin(), c.methods.end(), Method::analytic) > 0;
  const bool has_numeric = c.methods.size() > (has_analytic ? 1u : 0u);
  if (c.command == Command::compare && (!has_analytic || !has_numeric)) {
    throw UsageError("compare needs analytic and at least one numeric method");
  }
  if (c.command == Command::peak_scan && !has_numeric) throw UsageError("peak-scan needs a numeric method");
  for (const auto& f : c.formats) {
    if (f != "csv" && f != "json" && f != "plotscript") throw UsageError("unknown format '" + f + "'");
  }
}

/// Grid plus the rounding warnings for tau N that is not an integer.
struct ResolvedGrid {
  std::vector<GridPoint> points;
  std::vector<std::string> warnings;
};

inline ResolvedGrid resolve_grid(const SweepConfig& c) {
  ResolvedGrid out;
  std::set<std::string> seen;
  auto add = [&](int n, double tau, double h) {
    int m;
    double requested;
    if (c.m_sub && c.command != Command::sweep_tau) {
      m = *c.m_sub;
      requested = static_cast<double>(m) / n;
    } else {
      m = Bipartition::from_fraction(n, tau).m_sub();
      requested = tau;
      if (std::abs(tau * n - m) > 1e-9) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "N=%d tau=%.10g: tau*N not integral, using M=%d (tau=%.10g)", n, tau, m,
                      static_cast<double>(m) / n);
        if (seen.insert(buf).second) out.warnings.emplace_back(buf);
      }
    }
    out.points.push_back({n, m, h, requested});
  };
  const auto hs = h_values(c);
  for (int n : c.n_list) {
    if (c.command == Command::sweep_tau) {
      for (double h : hs) {
        for (double t : tau_values(c)) add(n, t, h);
      }
    } else {
      for (double h : hs) add(n, c.tau, h);
    }
  }
  return out;
}

inline SweepSettings settings_for(const SweepConfig& c) {
  SweepSettings s;
  s.gamma = c.gamma;
  s.delta = c.delta;
  s.methods = c.methods;
  s.jobs = c.jobs;
  // Failures are recorded as rows; the exit code reflects them afterwards.
  s.skip_errors = true;
  return s;
}

/// Shortest %g form that reads back to the same double.
inline std::string shortest(double x) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + shortest(v[i]);
  return out;
}

/// Deterministic key=value echo of every setting, one per line.
inline std::vector<std::string> echo(const SweepConfig& c) {
  std::vector<std::string> lines;
  auto add = [&](const std::string& k, const std::string& v) { lines.push_back(k + "=" + v); };
  auto str = [](double x) { return shortest(x); };
  add("command", command_name(c.command));
  add("gamma", str(c.gamma));
  if (c.m_sub) add("m", std::to_string(*c.m_sub));
  if (c.command == Command::sweep_tau) {
    add("tau", join_doubles(tau_values(c)));
  } else if (!c.m_sub) {
    add("tau", str(c.tau));
  }
  std::string ns;
  for (std::size_t i = 0; i < c.n_list.size(); ++i) ns += (i ? "," : "") + std::to_string(c.n_list[i]);
  add("n", ns);
  if (!c.h_list.empty()) {
    add("h-list", join_doubles(c.h_list));
  } else {
    add("h-start", str(c.h_range.start));
    add("h-stop", str(c.h_range.stop));
    add("h-count", std::to_string(c.h_range.count));
  }
  add("delta", c.delta ? str(*c.delta) : "auto");
  std::string ms;
  for (std::size_t i = 0; i < c.methods.size(); ++i) ms += (i ? "," : "") + std::string(to_string(c.methods[i]));
  add("methods", ms);
  return lines;
}

}  // namespace lmgfs::cli
