#pragma once

// Command-line parsing. All options live on the top-level app; subcommands
// fall through to it, so `lmgfs sweep-h --n 64` and `lmgfs --n 64 sweep-h`
// are equivalent and a config file can set any option.

#include <CLI11.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace lmgfs::cli {

inline constexpr const char* kConfigHelp = R"(Config file (--config FILE): one `key = value` per line, keys are long
option names without dashes, lists in brackets, '#' starts a comment.
Command-line flags override config keys, which override defaults.

  gamma = 0.5
  tau = 0.5
  n = [64, 128]
  h-start = 0.9
  h-stop = 1.1
  h-count = 41
  methods = [finite-difference, analytic]
  formats = [csv, json]

Exit codes: 0 success, 1 usage error, 2 output not writable,
3 numerical failure (unless --skip-errors) or failed --check.)";

/// Parses argv and runs the selected command. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fidelity susceptibility of the LMG model: exact sweeps and thermodynamic-limit comparison",
               "lmgfs"};
  app.footer(kConfigHelp);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(LMGFS_VERSION));
  app.set_config("--config", "", "Read options from a key=value file");

  SweepConfig config;
  std::vector<int> n_list;
  std::string delta = "auto";
  std::vector<std::string> methods, formats;
  std::optional<int> m_sub;

  app.add_option("--gamma", config.gamma, "Anisotropy gamma in [0, 1]")->capture_default_str();
  app.add_option("--tau", config.tau, "Subsystem fraction M/N")->capture_default_str();
  app.add_option("--m", m_sub, "Explicit subsystem size M (overrides --tau)");
  app.add_option("--n", n_list, "System size (repeatable; default 64 128 256 512)")->delimiter(',');
  auto* h_start = app.add_option("--h-start", config.h_range.start, "First h")->capture_default_str();
  auto* h_stop = app.add_option("--h-stop", config.h_range.stop, "Last h")->capture_default_str();
  auto* h_count = app.add_option("--h-count", config.h_range.count, "Number of h points")->capture_default_str();
  auto* h_list = app.add_option("--h-list", config.h_list, "Explicit h values (overrides the range)")->delimiter(',');
  app.add_option("--tau-start", config.tau_range.start, "First tau (sweep-tau)")->capture_default_str();
  app.add_option("--tau-stop", config.tau_range.stop, "Last tau (sweep-tau)")->capture_default_str();
  app.add_option("--tau-count", config.tau_range.count, "Number of tau points (sweep-tau)")->capture_default_str();
  app.add_option("--tau-list", config.tau_list, "Explicit tau values (sweep-tau)")->delimiter(',');
  app.add_option("--delta", delta, "Finite-difference step, or auto")->capture_default_str();
  app.add_option("--methods", methods, "finite-difference (fd), spectral, analytic")->delimiter(',');
  app.add_option("--out", config.out, "Output directory")->capture_default_str();
  app.add_option("--formats", formats, "csv, json, plotscript (default csv)")->delimiter(',');
  app.add_option("--jobs", config.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_flag("--skip-errors", config.skip_errors, "Record failed points and exit 0");
  app.add_flag("--check", config.check, "peak-scan: require peaks to approach h=1 and grow with N");

  auto* sweep_h = app.add_subcommand("sweep-h", "chi_g, chi_r, eta and entropy along h for each N")->fallthrough();
  auto* sweep_tau = app.add_subcommand("sweep-tau", "The same along tau at fixed h values")->fallthrough();
  auto* compare = app.add_subcommand("compare", "Numeric results against the thermodynamic-limit closed forms")
                      ->fallthrough();
  auto* peak = app.add_subcommand("peak-scan", "Location and height of the chi_r peak for each N")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << LMGFS_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nrun with --help for usage\n";
    return kUsage;
  }

  if (sweep_h->parsed()) config.command = Command::sweep_h;
  if (sweep_tau->parsed()) config.command = Command::sweep_tau;
  if (compare->parsed()) config.command = Command::compare;
  if (peak->parsed()) config.command = Command::peak_scan;

  try {
    if (!n_list.empty()) config.n_list = n_list;
    config.m_sub = m_sub;
    if (delta != "auto") {
      try {
        std::size_t used = 0;
        config.delta = std::stod(delta, &used);
        if (used != delta.size()) throw std::invalid_argument(delta);
      } catch (const std::exception&) {
        throw UsageError("--delta must be a number or auto, got '" + delta + "'");
      }
    }
    for (const auto& m : methods) {
      const auto parsed = parse_method(m);
      if (!parsed) throw UsageError("unknown method '" + m + "'");
      if (std::find(config.methods.begin(), config.methods.end(), *parsed) == config.methods.end()) {
        config.methods.push_back(*parsed);
      }
    }
    if (config.methods.empty()) {
      config.methods = config.command == Command::compare
                           ? std::vector<Method>{Method::finite_difference, Method::analytic}
                           : std::vector<Method>{Method::finite_difference};
    }
    if (!formats.empty()) config.formats = {formats.begin(), formats.end()};
    const bool h_given = h_start->count() + h_stop->count() + h_count->count() + h_list->count() > 0;
    if (config.command == Command::sweep_tau && !h_given) config.h_list = {0.6, 0.8, 0.9, 1.0, 1.1};

    return run(config, out, err).code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace lmgfs::cli
