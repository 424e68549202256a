// Subcommands behind the qsl executable. Each returns a process exit code.

#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "qsl/sweep.hpp"
#include "qsl/verify.hpp"

namespace qsl::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kIoError = 2,
  kSolverFailure = 3,
  kPartialSweep = 4,
  kUsageError = 64,
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes through a temporary file in the target directory and renames it
/// into place once `fill` returns, so a failure never leaves a partial file.
/// "-" writes straight to `stdout_stream`.
void write_output(const std::string& path, std::ostream& stdout_stream,
                  const std::function<void(std::ostream&)>& fill);

/// `key = value` lines; '#' starts a comment. Keys are the long flag names
/// without leading dashes (omega, gamma-min, c-factor, log-gamma, ...).
void load_config_file(const std::string& path, SweepConfig& config);
void set_config_value(SweepConfig& config, const std::string& key, const std::string& value);

/// kSuccess when at least 90 % of the rows succeeded, kPartialSweep otherwise.
int sweep_status(const std::vector<SweepRow>& rows);

int cmd_simulate(const SweepConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

}  // namespace qsl::cli
