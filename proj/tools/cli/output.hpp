#pragma once

// CSV, JSON and gnuplot writers for sweep results.

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "lmgfs/sweep.hpp"

#ifndef LMGFS_VERSION
#define LMGFS_VERSION "0.0.0"
#endif

namespace lmgfs::cli {

/// Output could not be written; maps to exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCsvHeader = "h,N,M,tau,tau_requested,chi_g,chi_r,eta,entropy,method,delta,status";

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Scientific notation with 15 significant digits; "nan" for missing values.
inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.14e", x);
  return buf;
}

// RFC 4180 quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Metadata {
  std::vector<std::string> echo;
  std::vector<std::string> warnings;
  std::string timestamp;
};

inline Metadata make_metadata(const SweepConfig& config, const std::vector<std::string>& warnings) {
  return {echo(config), warnings, utc_timestamp()};
}

inline void write_metadata(std::ostream& os, const Metadata& meta) {
  os << "# lmgfs " << LMGFS_VERSION << "\n";
  os << "# timestamp " << meta.timestamp << "\n";
  for (const auto& line : meta.echo) os << "# config " << line << "\n";
  for (const auto& w : meta.warnings) os << "# warning " << w << "\n";
}

inline std::size_t metadata_lines(const Metadata& meta) { return 2 + meta.echo.size() + meta.warnings.size(); }

inline void write_csv(std::ostream& os, const Metadata& meta, const std::vector<SweepPoint>& rows) {
  write_metadata(os, meta);
  os << kCsvHeader << "\n";
  for (const auto& r : rows) {
    os << num(r.h) << ',' << r.n << ',' << r.m_sub << ',' << num(r.tau) << ',' << num(r.tau_requested) << ','
       << num(r.chi_g) << ',' << num(r.chi_r) << ',' << num(r.eta) << ',' << num(r.entropy) << ','
       << csv_field(std::string(to_string(r.method))) << ',' << num(r.delta) << ','
       << csv_field(std::string(to_string(r.status))) << "\n";
  }
}

inline nlohmann::json metadata_json(const Metadata& meta) {
  nlohmann::json config = nlohmann::json::object();
  for (const auto& line : meta.echo) {
    const auto eq = line.find('=');
    config[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return {{"version", LMGFS_VERSION}, {"timestamp", meta.timestamp}, {"config", config}, {"warnings", meta.warnings}};
}

// NaN and inf become null.
inline nlohmann::json number_json(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

inline nlohmann::json row_json(const SweepPoint& r) {
  nlohmann::json j = {{"h", r.h},
                      {"N", r.n},
                      {"M", r.m_sub},
                      {"tau", r.tau},
                      {"tau_requested", r.tau_requested},
                      {"chi_g", number_json(r.chi_g)},
                      {"chi_r", number_json(r.chi_r)},
                      {"eta", number_json(r.eta)},
                      {"entropy", number_json(r.entropy)},
                      {"method", std::string(to_string(r.method))},
                      {"delta", r.delta},
                      {"status", std::string(to_string(r.status))}};
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

inline nlohmann::json rows_json(const Metadata& meta, const std::vector<SweepPoint>& rows) {
  auto j = metadata_json(meta);
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(row_json(r));
  return j;
}

inline std::filesystem::path prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir + "'" + (ec ? ": " + ec.message() : ""));
  }
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << content;
  f.close();
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

struct PlotPanel {
  std::string output;
  std::string ylabel;
  int column;
};

struct PlotCurve {
  std::string condition;  // gnuplot boolean over the row, e.g. $2==64
  std::string title;
};

inline std::vector<PlotCurve> curves_by_size(const std::vector<int>& sizes, const std::vector<Method>& methods) {
  std::vector<PlotCurve> curves;
  for (int n : sizes) {
    for (Method m : methods) {
      curves.push_back({"$2==" + std::to_string(n) + " && strcol(10) eq \"" + std::string(to_string(m)) + "\"",
                        "N=" + std::to_string(n) + " " + std::string(to_string(m))});
    }
  }
  return curves;
}

/// One PNG per panel; rows failing a curve's condition become missing points.
inline std::string plot_script(const std::string& stem, std::size_t skip, const std::string& xlabel, int x_col,
                               const std::vector<PlotPanel>& panels, const std::vector<PlotCurve>& curves) {
  std::ostringstream os;
  os << "# gnuplot script; run from the output directory: gnuplot " << stem << ".gp\n";
  os << "set datafile separator ','\nset terminal pngcairo size 900,600\n";
  os << "set key left top\nset xlabel '" << xlabel << "'\n";
  for (const auto& p : panels) {
    os << "\nset output '" << stem << "_" << p.output << ".png'\nset ylabel '" << p.ylabel << "'\nplot";
    bool first = true;
    for (const auto& c : curves) {
      os << (first ? " " : ", \\\n     ") << "'" << stem << ".csv' skip " << skip << " using " << x_col << ":(("
         << c.condition << ") ? $" << p.column << " : 1/0) with linespoints pt 7 ps 0.4 title '" << c.title << "'";
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace lmgfs::cli
