#include "qsl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "json.hpp"
#include "qsl/format.hpp"

namespace qsl {

double SweepConfig::lambda0_value() const { return lambda0.value_or(10.0 * omega); }

double SweepConfig::c_factor_value() const {
  if (c_factor) return *c_factor;
  return protocol == ProtocolKind::bang_bang ? 0.5 : 1.5;
}

void SweepConfig::validate_grid() const {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(gamma_min >= 0.0) || !(gamma_max > gamma_min)) {
    throw std::invalid_argument("need 0 <= gamma-min < gamma-max");
  }
  if (gamma_steps < 2) throw std::invalid_argument("gamma-steps must be >= 2");
  if (log_gamma && !(gamma_min > 0.0)) {
    throw std::invalid_argument("--log-gamma needs gamma-min > 0");
  }
  if (step && !(*step > 0.0)) throw std::invalid_argument("step must be positive");
  if (lambda0 && !(*lambda0 > 0.0)) throw std::invalid_argument("lambda0 must be positive");
  if (c_factor && !(*c_factor > 0.0)) throw std::invalid_argument("c-factor must be positive");
  // c gamma / omega^2 is the c-factor itself, so it fixes the regime for the whole grid.
  if (protocol == ProtocolKind::bang_bang && !(c_factor_value() < 1.0)) {
    throw std::invalid_argument("bang_bang needs c-factor < 1");
  }
  if (protocol == ProtocolKind::bang_off_bang && !(c_factor_value() > 1.0)) {
    throw std::invalid_argument("bang_off_bang needs c-factor > 1");
  }
}

ProtocolSpec make_spec(const SweepConfig& config, double gamma) {
  ProtocolSpec spec;
  spec.kind = config.protocol;
  spec.omega = config.omega;
  spec.gamma = gamma;
  spec.lambda0 = config.lambda0_value();
  if (gamma > 0.0) spec.c = config.c_factor_value() * config.omega * config.omega / gamma;
  return spec;
}

std::vector<double> gamma_grid(const SweepConfig& config) {
  config.validate_grid();
  const int n = config.gamma_steps;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / (n - 1);
    grid[i] = config.log_gamma
                  ? config.gamma_min * std::pow(config.gamma_max / config.gamma_min, u)
                  : config.gamma_min + u * (config.gamma_max - config.gamma_min);
  }
  grid.back() = config.gamma_max;
  return grid;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  const std::vector<double> grid = gamma_grid(config);
  std::vector<SweepRow> rows(grid.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      SweepRow& row = rows[i];
      row.gamma = grid[i];
      try {
        row.report = run_protocol(make_spec(config, grid[i]), config.step).report;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };

  const unsigned n_threads =
      std::clamp<unsigned>(std::thread::hardware_concurrency(), 1u, static_cast<unsigned>(grid.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  return rows;
}

const std::vector<std::string>& sweep_columns() {
  // The first thirteen are the stable schema; later columns are additions.
  static const std::vector<std::string> columns{
      "gamma",      "theta",    "s",           "T",        "T_A_closed",
      "T_A_traj",   "T_B_closed", "T_B_traj",  "T_C_closed", "T_m",
      "T_piecewise", "fidelity", "s_path",     "duration", "T_C_traj",
      "T_piecewise_traj", "error"};
  return columns;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? fmt_num(*v) : std::string{}; }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

// Numeric columns of a row, aligned with sweep_columns() minus "error".
std::vector<std::optional<double>> row_values(const SweepRow& row) {
  if (!row.report) {
    std::vector<std::optional<double>> v(sweep_columns().size() - 1);
    v[0] = row.gamma;
    return v;
  }
  const BoundsReport& r = *row.report;
  return {row.gamma,   r.theta,      r.s,          r.T,          r.T_A_closed,
          r.T_A_traj,  r.T_B_closed, r.T_B_traj,   r.T_C_closed, r.T_m.value,
          r.T_piecewise.value, r.fidelity, r.s_path, r.duration, r.T_C_traj,
          r.T_piecewise_traj};
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const auto& cols = sweep_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& row : rows) {
    for (const auto& v : row_values(row)) out << cell(v) << ',';
    out << csv_escape(row.error) << '\n';
  }
}

void write_sweep_json(std::ostream& out, const std::vector<SweepRow>& rows) {
  const auto& cols = sweep_columns();
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json rec = nlohmann::ordered_json::object();
    const auto values = row_values(row);
    for (std::size_t i = 0; i < values.size(); ++i) {
      rec[cols[i]] = values[i] ? nlohmann::ordered_json(*values[i]) : nlohmann::ordered_json();
    }
    rec["error"] = row.error.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(row.error);
    doc.push_back(std::move(rec));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace qsl
