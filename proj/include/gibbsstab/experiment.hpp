#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "gibbsstab/json_io.hpp"

namespace gstab {

/// Command-line values that take precedence over the config file.
struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  /// "f1,f2,panel", e.g. "C,G,P0" (table2 only).
  std::optional<std::string> cell;
};

/// Exit codes of the commands.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3 };

/// GSL_THREADS when set to a positive integer, else the hardware concurrency.
std::size_t thread_budget();

/// Runs fn(0..n-1) on up to thread_budget() threads. The first exception
/// thrown by any task is rethrown after all threads finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Chains for every (kernel, theta0, chain) combination: one CSV each plus a
/// summary JSON with acceptance statistics, ACF at lags 1..50 and the range
/// of Theta.
int cmd_run(const json& config, const CliOverrides& cli, std::ostream& log, std::ostream& err);

/// Empirical stability matrix for all 16 error pairs and both panels (P0,
/// P1), written as table2.csv plus table2_evidence.json.
int cmd_table2(const json& config, const CliOverrides& cli, std::ostream& log, std::ostream& err);

/// Evaluates one oracle query and returns {query, inputs, value, est_error}.
/// Throws ConfigError for unknown queries or bad inputs.
json oracle_query(const json& query);
int cmd_oracle(const json& query, const CliOverrides& cli, std::ostream& out, std::ostream& err);

/// Stability report (and oracle property verdicts for single-observation
/// models) for one model and kernel.
int cmd_diagnose(const json& config, const CliOverrides& cli, std::ostream& log, std::ostream& err);

}  // namespace gstab
