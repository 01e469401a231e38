#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "warpgeo/config.hpp"

namespace warpgeo {

enum class RowStatus { Pass, Fail, Skip, Error };

std::string to_string(RowStatus s);

/// One CSV line of a suite report.
struct ReportRow {
  std::string check;
  std::string surface;
  std::string ambient;
  int k = 0;
  std::optional<double> alpha;
  int N = 0;
  double value = 0.0;
  double scale = 1.0;
  double tolerance = 0.0;
  RowStatus status = RowStatus::Pass;
  std::optional<double> order;
  std::string note;

  /// |value| / max(scale, floor).
  double normalized() const;
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;

  int count(RowStatus s) const;
  /// 0 when no row failed or errored, 1 otherwise.
  int exit_code() const;
};

struct SuiteOptions {
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

/// Runs every check of the configuration. Check-level keys are validated before any work and
/// raise ConfigError; failures inside a job become Error rows. Rows are sorted by
/// (surface, check, k, alpha, N), independent of the number of workers.
SuiteReport run_suite(const SuiteConfig& config, const SuiteOptions& options = {});

/// Header comment with the seed, then
/// check,surface,ambient,k,alpha,N,value,scale,tolerance,passed,order.
void write_csv(const SuiteReport& report, std::ostream& out);

/// One file `<check>[_surface][_kK].dat` per series with at least two grid levels, columns
/// `N residual`. Throws std::runtime_error naming the directory when it does not exist.
std::vector<std::filesystem::path> write_plot_files(const SuiteReport& report,
                                                    const std::filesystem::path& dir);

/// Human-readable table of the rows with notes and a pass/fail tally.
void print_summary(const SuiteReport& report, std::ostream& out);

}  // namespace warpgeo
