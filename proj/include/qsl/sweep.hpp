// Parameter sweeps over gamma and their tabular output.

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qsl/bounds.hpp"
#include "qsl/protocols.hpp"

namespace qsl {

enum class OutputFormat { csv, json };

struct SweepConfig {
  double omega = 1.0;
  double gamma = 2.0;  // single-point commands
  double gamma_min = 0.0;
  double gamma_max = 10.0;
  int gamma_steps = 200;
  bool log_gamma = false;
  ProtocolKind protocol = ProtocolKind::composite_unconstrained;
  std::optional<double> lambda0;   // default 10 omega
  std::optional<double> c_factor;  // default 1.5 (bang_off_bang) or 0.5 (bang_bang)
  std::optional<double> step;      // default: per-segment rule
  std::string output = "-";        // "-" is standard output
  OutputFormat format = OutputFormat::csv;

  double lambda0_value() const;
  double c_factor_value() const;

  /// Throws std::invalid_argument on an unusable grid or parameter.
  void validate_grid() const;
};

/// Protocol spec for a single gamma; c = c_factor * omega^2 / gamma.
ProtocolSpec make_spec(const SweepConfig& config, double gamma);

/// Linear (or logarithmic with log_gamma) grid from gamma_min to gamma_max.
std::vector<double> gamma_grid(const SweepConfig& config);

struct SweepRow {
  double gamma = 0.0;
  std::optional<BoundsReport> report;
  std::string error;  // empty on success
};

/// Evaluates every grid point, concurrently when threads are available.
/// Rows come back ordered by gamma; a failing point becomes an error row.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

/// Column names of the sweep table, in order.
const std::vector<std::string>& sweep_columns();

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_sweep_json(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace qsl
