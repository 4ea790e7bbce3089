#pragma once

// Scenario-driven verification runs: JSON configs in, reports and curves out.

#include "anisotrope/montecarlo.hpp"
#include "anisotrope/report.hpp"

#include <iosfwd>
#include <memory>
#include <optional>

namespace anisotrope {

/// Malformed config; the message starts with the offending key path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

struct ScenarioReport {
  std::string name;
  std::string kind;
  std::uint64_t seed = 0;
  std::int64_t samples = 0;
  int workers = 1;
  std::vector<Check> checks;
  /// Named scalars worth keeping next to the checks, in insertion order.
  std::vector<std::pair<std::string, double>> diagnostics;
  /// Set when the scenario threw; the checks gathered so far are kept.
  std::optional<std::string> error;
  /// Plot-ready table for tube and Minkowski scenarios.
  std::vector<std::string> curve_header;
  std::vector<std::vector<std::string>> curve;

  bool pass() const { return !error && !checks.empty() && all_pass(checks); }
};

struct RunOptions {
  /// Reports are written here when non-empty.
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  /// Scenarios run concurrently on this many threads.
  int parallel = 1;
  /// Runs only scenarios whose name contains this string.
  std::string filter;
};

struct RunSummary {
  std::vector<ScenarioReport> reports;
  int passed() const;
  int exit_code() const { return passed() == static_cast<int>(reports.size()) ? kExitPass : kExitFail; }
};

/// A parsed and validated config.  Everything that can be checked without
/// running is checked on load, so a bad key fails before any work starts.
class Suite {
 public:
  static Suite load(const std::string& path);
  static Suite parse(const std::string& text, const std::string& origin = "config");

  std::vector<std::string> names() const;
  std::string kind(const std::string& name) const;

  RunSummary run(const RunOptions& opts = {}) const;
  /// Runs one scenario by exact name; throws ConfigError for unknown names.
  ScenarioReport run_one(const std::string& name, std::optional<std::uint64_t> seed = {}) const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

std::string report_json(const ScenarioReport& r);
std::string report_text(const ScenarioReport& r);
std::string summary_json(const RunSummary& s);
std::string summary_text(const RunSummary& s);
/// CSV of the scenario's curve table; throws DomainError when it has none.
std::string curve_csv(const ScenarioReport& r);

/// Writes <name>.json and <name>.txt per scenario plus summary.json and
/// summary.txt.  Scenario names become file names, so they must be safe.
void write_reports(const RunSummary& s, const std::string& dir);

/// Front ends used by the command-line tool; they return exit codes and
/// print diagnostics to `log`.
int run_command(const std::string& config, const RunOptions& opts, std::ostream& log);
int curve_command(const std::string& config, const std::string& scenario, const std::string& out_file,
                  std::optional<std::uint64_t> seed, std::ostream& log);

}  // namespace anisotrope
