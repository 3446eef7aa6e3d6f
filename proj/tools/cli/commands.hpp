#pragma once

// The four subcommands. Each writes its files into config.out and returns an
// exit code; UsageError and IoError propagate to the caller.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli/config.hpp"
#include "cli/output.hpp"
#include "lmgfs/critical.hpp"
#include "lmgfs/scaling.hpp"
#include "lmgfs/sweep.hpp"

namespace lmgfs::cli {

namespace detail {

inline int failure_code(const SweepConfig& config, const std::vector<SweepPoint>& rows, std::ostream& err) {
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (r.status != PointStatus::failed) continue;
    if (failed++ == 0) err << "error: " << r.message << "\n";
  }
  if (failed == 0) return kOk;
  err << failed << " row(s) failed" << (config.skip_errors ? " (recorded, --skip-errors set)" : "") << "\n";
  return config.skip_errors ? kOk : kNumerical;
}

inline void report_drift(const std::vector<SweepPoint>& rows, std::ostream& err) {
  std::size_t drifted = 0;
  for (const auto& r : rows) drifted += r.status == PointStatus::step_drift;
  if (drifted > 0) err << "warning: " << drifted << " row(s) flagged step-drift (halving delta moved chi by > 0.1%)\n";
}

inline std::vector<Method> numeric_methods(const std::vector<Method>& methods) {
  std::vector<Method> out;
  for (Method m : methods) {
    if (m != Method::analytic) out.push_back(m);
  }
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

inline double rel_dev(double numeric, double exact) { return std::abs(numeric - exact) / std::abs(exact); }

inline std::string fixed(double x, int prec = 6) {
  if (std::isnan(x)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

}  // namespace detail

struct RunResult {
  int code = kOk;
  std::vector<SweepPoint> rows;
};

/// Sweep shared by sweep-h and sweep-tau; writes <stem>.csv/.json/.gp.
inline RunResult run_sweep(const SweepConfig& config, std::ostream& out, std::ostream& err) {
  validate(config);
  const auto grid = resolve_grid(config);
  const auto dir = prepare_output_dir(config.out);
  for (const auto& w : grid.warnings) err << "warning: " << w << "\n";

  RunResult result;
  result.rows = sweep(grid.points, settings_for(config));
  const auto meta = make_metadata(config, grid.warnings);
  const std::string stem = command_stem(config.command);

  if (config.formats.count("csv")) {
    std::ostringstream csv;
    write_csv(csv, meta, result.rows);
    write_file(dir / (stem + ".csv"), csv.str());
  }
  if (config.formats.count("json")) write_file(dir / (stem + ".json"), rows_json(meta, result.rows).dump(2) + "\n");
  if (config.formats.count("plotscript")) {
    const std::size_t skip = metadata_lines(meta) + 1;
    std::string script;
    if (config.command == Command::sweep_tau) {
      std::vector<PlotCurve> curves;
      for (int n : config.n_list) {
        for (double h : h_values(config)) {
          for (Method m : config.methods) {
            char cond[160], title[96];
            std::snprintf(cond, sizeof cond, "$2==%d && abs($1-(%.17g))<1e-12 && strcol(10) eq \"%s\"", n, h,
                          std::string(to_string(m)).c_str());
            std::snprintf(title, sizeof title, "N=%d h=%g %s", n, h, std::string(to_string(m)).c_str());
            curves.push_back({cond, title});
          }
        }
      }
      script = plot_script(stem, skip, "tau", 4, {{"eta", "eta = chi_r / chi_g", 8}, {"entropy", "entropy", 9}},
                           curves);
    } else {
      script = plot_script(stem, skip, "h",
                           1, {{"chi_r", "chi_r", 7}, {"eta", "eta = chi_r / chi_g", 8}, {"chi_g", "chi_g", 6}},
                           curves_by_size(config.n_list, config.methods));
    }
    write_file(dir / (stem + ".gp"), script);
  }

  detail::report_drift(result.rows, err);
  out << "wrote " << result.rows.size() << " rows to " << (dir / stem).string() << ".*\n";
  result.code = detail::failure_code(config, result.rows, err);
  return result;
}

/// Numeric-vs-analytic report: compare.txt, compare.json and (if requested)
/// compare.csv with the raw rows.
inline RunResult run_compare(const SweepConfig& config, std::ostream& out, std::ostream& err) {
  validate(config);
  const auto grid = resolve_grid(config);
  const auto dir = prepare_output_dir(config.out);
  for (const auto& w : grid.warnings) err << "warning: " << w << "\n";

  RunResult result;
  result.rows = sweep(grid.points, settings_for(config));
  const auto meta = make_metadata(config, grid.warnings);

  // Analytic row for each (N, M, h).
  std::map<std::tuple<int, int, double>, const SweepPoint*> analytic;
  for (const auto& r : result.rows) {
    if (r.method == Method::analytic) analytic[{r.n, r.m_sub, r.h}] = &r;
  }

  auto report = metadata_json(meta);
  report["points"] = nlohmann::json::array();
  report["singular"] = nlohmann::json::array();
  std::map<std::pair<int, Method>, std::pair<std::vector<double>, std::vector<double>>> devs;

  std::ostringstream text;
  text << "# lmgfs " << LMGFS_VERSION << " compare, " << meta.timestamp << "\n";
  for (const auto& line : meta.echo) text << "# " << line << "\n";
  text << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%6s %6s %12s %-18s %14s %14s %11s %14s %14s %11s\n", "N", "M", "h", "method",
                "chi_r", "chi_r_exact", "dev_chi_r", "chi_g", "chi_g_exact", "dev_chi_g");
  text << line;

  for (const auto& r : result.rows) {
    if (r.method == Method::analytic) {
      if (r.status == PointStatus::singular || r.status == PointStatus::unsupported) {
        report["singular"].push_back(
            {{"N", r.n}, {"M", r.m_sub}, {"h", r.h}, {"status", std::string(to_string(r.status))}});
      }
      continue;
    }
    const SweepPoint* a = analytic.at({r.n, r.m_sub, r.h});
    nlohmann::json p = {{"N", r.n},
                        {"M", r.m_sub},
                        {"h", r.h},
                        {"tau", r.tau},
                        {"method", std::string(to_string(r.method))},
                        {"chi_r", number_json(r.chi_r)},
                        {"chi_g", number_json(r.chi_g)},
                        {"status", std::string(to_string(r.status))},
                        {"analytic_status", std::string(to_string(a->status))}};
    double dr = std::nan(""), dg = std::nan("");
    if (a->computed() && r.computed()) {
      dr = detail::rel_dev(r.chi_r, a->chi_r);
      dg = detail::rel_dev(r.chi_g, a->chi_g);
      p["chi_r_analytic"] = number_json(a->chi_r);
      p["chi_g_analytic"] = number_json(a->chi_g);
      p["chi_r_rel_dev"] = number_json(dr);
      p["chi_g_rel_dev"] = number_json(dg);
      auto& bucket = devs[{r.n, r.method}];
      bucket.first.push_back(dr);
      bucket.second.push_back(dg);
    }
    report["points"].push_back(p);
    std::snprintf(line, sizeof line, "%6d %6d %12.6f %-18s %14.6e %14.6e %11.3e %14.6e %14.6e %11.3e%s\n", r.n,
                  r.m_sub, r.h, std::string(to_string(r.method)).c_str(), r.chi_r, a->chi_r, dr, r.chi_g, a->chi_g,
                  dg, a->computed() ? "" : ("  [analytic " + std::string(to_string(a->status)) + "]").c_str());
    text << line;
  }

  text << "\nsummary (relative deviation from the closed forms)\n";
  std::snprintf(line, sizeof line, "%6s %-18s %6s %12s %12s %12s %12s\n", "N", "method", "points", "max_chi_r",
                "median_chi_r", "max_chi_g", "median_chi_g");
  text << line;
  report["summary"] = nlohmann::json::array();
  for (const auto& [key, v] : devs) {
    const double max_r = *std::max_element(v.first.begin(), v.first.end());
    const double max_g = *std::max_element(v.second.begin(), v.second.end());
    const double med_r = detail::median(v.first), med_g = detail::median(v.second);
    report["summary"].push_back({{"N", key.first},
                                 {"method", std::string(to_string(key.second))},
                                 {"points", v.first.size()},
                                 {"max_chi_r_rel_dev", max_r},
                                 {"median_chi_r_rel_dev", med_r},
                                 {"max_chi_g_rel_dev", max_g},
                                 {"median_chi_g_rel_dev", med_g}});
    std::snprintf(line, sizeof line, "%6d %-18s %6zu %12.4e %12.4e %12.4e %12.4e\n", key.first,
                  std::string(to_string(key.second)).c_str(), v.first.size(), max_r, med_r, max_g, med_g);
    text << line;
  }
  if (!report["singular"].empty()) {
    text << "\n" << report["singular"].size() << " point(s) where the closed forms do not apply (flagged, not computed)\n";
  }

  try {
    const double tau = config.m_sub ? static_cast<double>(*config.m_sub) / config.n_list.back() : config.tau;
    const auto e = divergence_exponents(config.gamma, tau, config.n_list.back());
    const FitWindow w;
    report["exponents"] = {{"window", {w.lo, w.hi}},
                           {"broken_chi_r_per_n", e.broken_chi_r_per_n},
                           {"symmetric_chi_r", e.symmetric_chi_r},
                           {"broken_entropy", e.broken_entropy},
                           {"symmetric_entropy", e.symmetric_entropy}};
    text << "\nclosed-form divergence exponents, |h-1| in [" << w.lo << ", " << w.hi << "]\n"
         << "  chi_r / N, h < 1:       " << detail::fixed(e.broken_chi_r_per_n) << "  (law: -1/2)\n"
         << "  chi_r, h > 1:           " << detail::fixed(e.symmetric_chi_r) << "  (law: -2)\n"
         << "  dE/dln|h-1|, h < 1:     " << detail::fixed(e.broken_entropy) << "  (law: -1/4)\n"
         << "  dE/dln|h-1|, h > 1:     " << detail::fixed(e.symmetric_entropy) << "  (law: -1/4)\n";
  } catch (const InvalidArgument& e) {
    report["exponents"] = nullptr;
    text << "\nexponent fits unavailable: " << e.what() << "\n";
  }

  write_file(dir / "compare.txt", text.str());
  write_file(dir / "compare.json", report.dump(2) + "\n");
  if (config.formats.count("csv")) {
    std::ostringstream csv;
    write_csv(csv, meta, result.rows);
    write_file(dir / "compare.csv", csv.str());
  }
  if (config.formats.count("plotscript")) {
    write_file(dir / "compare.gp",
               plot_script("compare", metadata_lines(meta) + 1, "h", 1, {{"chi_r", "chi_r", 7}, {"chi_g", "chi_g", 6}},
                           curves_by_size(config.n_list, config.methods)));
  }

  detail::report_drift(result.rows, err);
  out << text.str();
  result.code = detail::failure_code(config, result.rows, err);
  return result;
}

struct PeakRow {
  int n = 0;
  int m_sub = 0;
  Method method = Method::finite_difference;
  double location = 0.0;
  double height = 0.0;
  double grid_h = 0.0;
};

/// Per-N maximum of chi_r(h). With --check and more than one N, the peak must
/// move strictly toward h = 1 and grow strictly with N.
inline RunResult run_peak_scan(const SweepConfig& config, std::ostream& out, std::ostream& err,
                               std::vector<PeakRow>* peaks_out = nullptr) {
  validate(config);
  const Method method = detail::numeric_methods(config.methods).front();
  SweepConfig effective = config;
  effective.methods = {method};
  const auto grid = resolve_grid(effective);
  const auto dir = prepare_output_dir(config.out);
  for (const auto& w : grid.warnings) err << "warning: " << w << "\n";

  RunResult result;
  result.rows = sweep(grid.points, settings_for(effective));
  result.code = detail::failure_code(config, result.rows, err);
  if (result.code != kOk) return result;

  std::vector<PeakRow> peaks;
  for (int n : config.n_list) {
    std::vector<double> x, y;
    int m = 0;
    for (const auto& r : result.rows) {
      if (r.n != n || !r.computed()) continue;
      x.push_back(r.h);
      y.push_back(r.chi_r);
      m = r.m_sub;
    }
    try {
      const auto p = refine_peak(x, y);
      peaks.push_back({n, m, method, p.location, p.height, x[p.grid_index]});
    } catch (const InvalidArgument& e) {
      throw UsageError("N=" + std::to_string(n) + ": " + e.what());
    }
  }

  const auto meta = make_metadata(effective, grid.warnings);
  std::ostringstream csv, text;
  write_metadata(csv, meta);
  csv << "N,M,h_peak,chi_r_peak,h_grid,method\n";
  auto report = metadata_json(meta);
  report["peaks"] = nlohmann::json::array();
  char line[160];
  std::snprintf(line, sizeof line, "%6s %6s %14s %14s %12s\n", "N", "M", "h_peak", "chi_r_peak", "|h_peak-1|");
  text << line;
  for (const auto& p : peaks) {
    csv << p.n << ',' << p.m_sub << ',' << num(p.location) << ',' << num(p.height) << ',' << num(p.grid_h) << ','
        << to_string(p.method) << "\n";
    report["peaks"].push_back({{"N", p.n},
                               {"M", p.m_sub},
                               {"h_peak", p.location},
                               {"chi_r_peak", p.height},
                               {"h_grid", p.grid_h},
                               {"method", std::string(to_string(p.method))}});
    std::snprintf(line, sizeof line, "%6d %6d %14.8f %14.6e %12.4e\n", p.n, p.m_sub, p.location, p.height,
                  std::abs(p.location - 1.0));
    text << line;
  }

  bool check_ok = true;
  if (config.check && peaks.size() > 1) {
    for (std::size_t i = 1; i < peaks.size(); ++i) {
      const bool closer = std::abs(peaks[i].location - 1.0) < std::abs(peaks[i - 1].location - 1.0);
      const bool higher = peaks[i].height > peaks[i - 1].height;
      if (!closer || !higher) {
        check_ok = false;
        text << "check failed between N=" << peaks[i - 1].n << " and N=" << peaks[i].n << ":"
             << (closer ? "" : " peak did not move toward h=1") << (higher ? "" : " peak height did not grow")
             << "\n";
      }
    }
    text << (check_ok ? "check passed: peaks approach h=1 and grow with N\n" : "");
    report["check"] = check_ok;
  } else if (config.check) {
    text << "check skipped: needs at least two sizes\n";
  }

  if (config.formats.count("csv")) write_file(dir / "peak_scan.csv", csv.str());
  if (config.formats.count("json")) write_file(dir / "peak_scan.json", report.dump(2) + "\n");
  if (config.formats.count("plotscript")) {
    std::ostringstream gp;
    gp << "# gnuplot script; run from the output directory: gnuplot peak_scan.gp\n"
       << "set datafile separator ','\nset terminal pngcairo size 900,600\nset logscale xy\n"
       << "set xlabel 'N'\nset ylabel '|h_peak - 1|'\nset y2label 'chi_r peak'\nset y2tics\nset logscale y2\n"
       << "set output 'peak_scan.png'\n"
       << "plot 'peak_scan.csv' skip " << metadata_lines(meta) + 1
       << " using 1:(abs($3-1)) with linespoints title '|h_peak - 1|', \\\n"
       << "     '' skip " << metadata_lines(meta) + 1 << " using 1:4 axes x1y2 with linespoints title 'peak height'\n";
    write_file(dir / "peak_scan.gp", gp.str());
  }

  out << text.str();
  if (peaks_out) *peaks_out = peaks;
  if (!check_ok) result.code = kNumerical;
  return result;
}

inline RunResult run(const SweepConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.command) {
    case Command::sweep_h:
    case Command::sweep_tau: return run_sweep(config, out, err);
    case Command::compare: return run_compare(config, out, err);
    case Command::peak_scan: return run_peak_scan(config, out, err);
  }
  return {};
}

}  // namespace lmgfs::cli
