#include "qsl/commands.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "qsl/format.hpp"

namespace qsl::cli {

namespace fs = std::filesystem;

void write_output(const std::string& path, std::ostream& stdout_stream,
                  const std::function<void(std::ostream&)>& fill) {
  if (path == "-") {
    fill(stdout_stream);
    stdout_stream.flush();
    return;
  }
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + tmp.string() + "' for writing");
    try {
      fill(file);
    } catch (...) {
      file.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw;
    }
    file.flush();
    if (!file) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) throw std::invalid_argument(key + ": not a number: '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string v = value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument(key + ": not a boolean: '" + value + "'");
}

std::string summary_line(const BoundsReport& r, const ControlSchedule& schedule) {
  std::ostringstream os;
  os << "protocol=" << to_string(r.kind) << " omega=" << fmt_num(r.omega)
     << " gamma=" << fmt_num(r.gamma) << " segments=" << schedule.size()
     << " T=" << fmt_num(r.T) << " duration=" << fmt_num(r.duration)
     << " fidelity=" << fmt_num(r.fidelity) << " infidelity=" << fmt_num(r.infidelity)
     << " s=" << fmt_num(r.s) << " s_path=" << fmt_num(r.s_path);
  if (r.kind != ProtocolKind::composite_unconstrained && r.gamma > 0.0) {
    os << " first_bang=" << (schedule.segments().front().lambda_value > 0.0 ? "+c" : "-c");
  }
  return os.str();
}

}  // namespace

void set_config_value(SweepConfig& config, const std::string& raw_key, const std::string& value) {
  std::string key = raw_key;
  std::replace(key.begin(), key.end(), '_', '-');
  if (key == "omega") config.omega = parse_double(key, value);
  else if (key == "gamma") config.gamma = parse_double(key, value);
  else if (key == "gamma-min") config.gamma_min = parse_double(key, value);
  else if (key == "gamma-max") config.gamma_max = parse_double(key, value);
  else if (key == "gamma-steps") {
    const double n = parse_double(key, value);
    if (n != std::floor(n)) throw std::invalid_argument("gamma-steps must be an integer");
    config.gamma_steps = static_cast<int>(n);
  } else if (key == "protocol") config.protocol = parse_protocol_kind(value);
  else if (key == "lambda0") config.lambda0 = parse_double(key, value);
  else if (key == "c-factor") config.c_factor = parse_double(key, value);
  else if (key == "step") config.step = parse_double(key, value);
  else if (key == "output") config.output = value;
  else if (key == "format") {
    if (value == "csv") config.format = OutputFormat::csv;
    else if (value == "json") config.format = OutputFormat::json;
    else throw std::invalid_argument("format must be csv or json");
  } else if (key == "log-gamma") config.log_gamma = parse_bool(key, value);
  else throw std::invalid_argument("unknown config key '" + raw_key + "'");
}

void load_config_file(const std::string& path, SweepConfig& config) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

int sweep_status(const std::vector<SweepRow>& rows) {
  if (rows.empty()) return kPartialSweep;
  const auto failed = std::count_if(rows.begin(), rows.end(),
                                    [](const SweepRow& r) { return !r.error.empty(); });
  const double ok_fraction =
      1.0 - static_cast<double>(failed) / static_cast<double>(rows.size());
  return ok_fraction >= 0.9 ? kSuccess : kPartialSweep;
}

int cmd_simulate(const SweepConfig& config, std::ostream& out, std::ostream& err) {
  const ProtocolSpec spec = make_spec(config, config.gamma);
  if (spec.kind == ProtocolKind::composite_unconstrained &&
      composite_lambda0_is_small(spec.omega, spec.lambda0)) {
    err << "warning: lambda0 = " << fmt_num(spec.lambda0)
        << " is below 10 omega; the bangs are far from instantaneous\n";
  }
  std::optional<ProtocolRun> run;
  try {
    run = run_protocol(spec, config.step);
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const InsufficientActionError& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    write_output(config.output, out, [&](std::ostream& os) {
      if (config.format == OutputFormat::json) write_trajectory_json(os, run->trajectory);
      else write_trajectory_csv(os, run->trajectory);
    });
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  (config.output == "-" ? err : out) << summary_line(run->report, run->schedule) << '\n';
  return kSuccess;
}

int cmd_sweep(const SweepConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate_grid();
    make_spec(config, config.gamma_max);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  if (config.protocol == ProtocolKind::composite_unconstrained &&
      composite_lambda0_is_small(config.omega, config.lambda0_value())) {
    err << "warning: lambda0 is below 10 omega; trajectory columns are far from the limit\n";
  }
  const std::vector<SweepRow> rows = run_sweep(config);
  try {
    write_output(config.output, out, [&](std::ostream& os) {
      if (config.format == OutputFormat::json) write_sweep_json(os, rows);
      else write_sweep_csv(os, rows);
    });
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  for (const auto& r : rows) {
    if (!r.error.empty()) err << "gamma=" << fmt_num(r.gamma) << ": " << r.error << '\n';
  }
  return sweep_status(rows);
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  std::vector<PropertyResult> results;
  try {
    results = run_verification(options);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  worst=" << fmt_num(r.worst)
        << " tol=" << fmt_num(r.tolerance);
    if (!r.detail.empty()) out << "  " << r.detail;
    out << '\n';
    all = all && r.passed;
  }
  out << (all ? "all properties passed" : "verification FAILED") << '\n';
  return all ? kSuccess : kVerificationFailed;
}

}  // namespace qsl::cli
