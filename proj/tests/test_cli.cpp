#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "qsl/commands.hpp"

using namespace qsl;
using namespace qsl::cli;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qsl_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Value of `key=` in a summary line.
double summary_value(const std::string& summary, const std::string& key) {
  const auto pos = summary.find(" " + key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stod(summary.substr(pos + key.size() + 2));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QSL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config file parsing") {
  TempDir dir;
  const fs::path file = dir.path / "run.conf";
  std::ofstream(file) << "# sweep settings\n"
                         "omega = 2\n"
                         "gamma_max = 5   # underscores are accepted\n"
                         "gamma-steps=11\n"
                         "\n"
                         "protocol = bang_bang\n"
                         "log-gamma = false\n"
                         "format = json\n";
  SweepConfig c;
  load_config_file(file.string(), c);
  CHECK(c.omega == 2.0);
  CHECK(c.gamma_max == 5.0);
  CHECK(c.gamma_steps == 11);
  CHECK(c.protocol == ProtocolKind::bang_bang);
  CHECK(c.format == OutputFormat::json);
  CHECK_FALSE(c.log_gamma);

  // Flags applied afterwards win.
  set_config_value(c, "omega", "3");
  CHECK(c.omega == 3.0);

  CHECK_THROWS_AS(set_config_value(c, "omgea", "1"), std::invalid_argument);
  CHECK_THROWS_AS(set_config_value(c, "omega", "1x"), std::invalid_argument);
  CHECK_THROWS_AS(set_config_value(c, "gamma-steps", "2.5"), std::invalid_argument);
  CHECK_THROWS_AS(set_config_value(c, "format", "xml"), std::invalid_argument);
  CHECK_THROWS_AS(load_config_file((dir.path / "missing.conf").string(), c), IoError);

  std::ofstream(dir.path / "bad.conf") << "omega 2\n";
  CHECK_THROWS_AS(load_config_file((dir.path / "bad.conf").string(), c), std::invalid_argument);
}

TEST_CASE("sweep defaults and grid") {
  SweepConfig c;
  CHECK(c.gamma_min == 0.0);
  CHECK(c.gamma_max == 10.0);
  CHECK(c.lambda0_value() == 10.0);
  CHECK(c.c_factor_value() == 1.5);
  c.protocol = ProtocolKind::bang_bang;
  CHECK(c.c_factor_value() == 0.5);

  c.gamma_steps = 5;
  const auto g = gamma_grid(c);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g[1] == 2.5);
  CHECK(g.back() == 10.0);

  c.log_gamma = true;
  CHECK_THROWS_AS(gamma_grid(c), std::invalid_argument);
  c.gamma_min = 0.1;
  const auto lg = gamma_grid(c);
  CHECK(lg[2] == Approx(1.0).epsilon(1e-14));
  CHECK(lg.back() == 10.0);

  c.gamma_steps = 1;
  CHECK_THROWS_AS(c.validate_grid(), std::invalid_argument);

  const ProtocolSpec spec = make_spec(SweepConfig{}, 2.0);
  CHECK(spec.c == 0.75);
}

TEST_CASE("sweep CSV schema and determinism") {
  SweepConfig c;
  c.gamma_steps = 9;
  std::ostringstream a, b, err;
  CHECK(cmd_sweep(c, a, err) == kSuccess);
  CHECK(cmd_sweep(c, b, err) == kSuccess);
  CHECK(a.str() == b.str());

  const auto rows = lines_of(a.str());
  REQUIRE(rows.size() == 10);
  const std::string documented =
      "gamma,theta,s,T,T_A_closed,T_A_traj,T_B_closed,T_B_traj,T_C_closed,T_m,T_piecewise,"
      "fidelity,s_path";
  CHECK(rows[0] == documented + ",duration,T_C_traj,T_piecewise_traj,error");
  std::string joined;
  for (const auto& col : sweep_columns()) joined += (joined.empty() ? "" : ",") + col;
  CHECK(rows[0] == joined);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(split(rows[i]).size() == sweep_columns().size());
  }
}

TEST_CASE("sweep endpoints match the analytic limits") {
  SweepConfig c;
  c.gamma_min = 0.0;
  c.gamma_max = 1e3;
  c.gamma_steps = 2;
  c.format = OutputFormat::json;
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(c, out, err) == kSuccess);
  const auto doc = nlohmann::json::parse(out.str());
  REQUIRE(doc.size() == 2);
  CHECK(doc[0]["T"].get<double>() == 0.0);
  CHECK(doc[1]["T"].get<double>() == Approx(std::numbers::pi / 2).epsilon(1e-3));
  CHECK(doc[1]["T"].get<double>() == Approx(std::atan(1e3)).epsilon(1e-12));
  CHECK(doc[1]["error"].is_null());
}

TEST_CASE("bang-bang sweep rows have equal trajectory bounds") {
  SweepConfig c;
  c.protocol = ProtocolKind::bang_bang;
  c.gamma_min = 0.5;
  c.gamma_max = 5.0;
  c.gamma_steps = 6;
  for (const auto& row : run_sweep(c)) {
    REQUIRE(row.report);
    CHECK(std::abs(row.report->T_A_traj - row.report->T_B_traj) <= 1e-6);
    CHECK(std::abs(row.report->T_C_traj - row.report->T_B_traj) <= 1e-6);
  }
}

TEST_CASE("simulate examples") {
  SUBCASE("composite, lambda0 = 10") {
    SweepConfig c;
    c.lambda0 = 10.0;
    std::ostringstream out, err;
    REQUIRE(cmd_simulate(c, out, err) == kSuccess);
    const auto rows = lines_of(out.str());
    CHECK(rows[0] == "t,re_amp0,im_amp0,re_amp1,im_amp1,x,y,z,delta_e,action");
    CHECK(err.str().find("segments=3") != std::string::npos);
    CHECK(summary_value(err.str(), "infidelity") <= composite_infidelity_envelope(1.0, 10.0));
  }
  SUBCASE("gamma = 0 gives a single point") {
    SweepConfig c;
    c.gamma = 0.0;
    std::ostringstream out, err;
    REQUIRE(cmd_simulate(c, out, err) == kSuccess);
    CHECK(lines_of(out.str()).size() == 2);
    CHECK(summary_value(err.str(), "T") == 0.0);
  }
  SUBCASE("bang-bang") {
    SweepConfig c;
    c.protocol = ProtocolKind::bang_bang;
    c.c_factor = 0.5;
    std::ostringstream out, err;
    REQUIRE(cmd_simulate(c, out, err) == kSuccess);
    CHECK(err.str().find("segments=2") != std::string::npos);
    CHECK(summary_value(err.str(), "infidelity") <= 1e-9);
  }
  SUBCASE("small lambda0 warns") {
    SweepConfig c;
    c.lambda0 = 2.0;
    std::ostringstream out, err;
    CHECK(cmd_simulate(c, out, err) == kSuccess);
    CHECK(err.str().find("warning") != std::string::npos);
  }
  SUBCASE("regime mismatch is a usage error") {
    SweepConfig c;
    c.protocol = ProtocolKind::bang_bang;
    c.c_factor = 1.5;
    std::ostringstream out, err;
    CHECK(cmd_simulate(c, out, err) == kUsageError);
  }
}

TEST_CASE("output goes through a temporary file") {
  TempDir dir;
  const fs::path target = dir.path / "out.csv";
  std::ostringstream sink;

  write_output(target.string(), sink, [](std::ostream& os) { os << "a,b\n1,2\n"; });
  std::ifstream in(target);
  std::string first;
  std::getline(in, first);
  CHECK(first == "a,b");

  // A failure while filling leaves the old file untouched and no temp file.
  CHECK_THROWS(write_output(target.string(), sink, [](std::ostream& os) {
    os << "partial";
    throw std::runtime_error("boom");
  }));
  std::ifstream again(target);
  std::getline(again, first);
  CHECK(first == "a,b");
  CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator{}) == 1);

  SweepConfig c;
  c.output = (dir.path / "no_such_dir" / "x.csv").string();
  std::ostringstream out, err;
  CHECK(cmd_simulate(c, out, err) == kIoError);
  CHECK_FALSE(fs::exists(dir.path / "no_such_dir"));

  c.output = (dir.path / "traj.csv").string();
  CHECK(cmd_simulate(c, out, err) == kSuccess);
  CHECK(fs::exists(c.output));
  CHECK(out.str().find("protocol=composite") != std::string::npos);
}

TEST_CASE("partial sweep failure exit code") {
  // At c-factor exactly 1 every gamma > 0 sits on the regime boundary.
  SweepConfig c;
  c.protocol = ProtocolKind::bang_off_bang;
  c.c_factor = 1.0;
  c.gamma_min = 1.0;
  c.gamma_steps = 4;
  std::ostringstream out, err;
  CHECK(cmd_sweep(c, out, err) == kUsageError);

  c.c_factor = 1.5;
  c.step = -1.0;
  CHECK(cmd_sweep(c, out, err) == kUsageError);

  std::vector<SweepRow> rows(10);
  CHECK(sweep_status(rows) == kSuccess);
  rows[3].error = "target unreachable with given structure";
  CHECK(sweep_status(rows) == kSuccess);
  rows[7].error = "target unreachable with given structure";
  CHECK(sweep_status(rows) == kPartialSweep);
}

TEST_CASE("command-line exit codes") {
  TempDir dir;
  CHECK(run_cli("simulate --gamma 2") == 0);
  CHECK(run_cli("simulate --protocol bang_bang --c-factor 0.5 --output " +
                (dir.path / "bb.csv").string()) == 0);
  CHECK(fs::exists(dir.path / "bb.csv"));
  CHECK(run_cli("simulate --output " + (dir.path / "missing" / "x.csv").string()) == 2);
  CHECK(run_cli("sweep --gamma-steps 1") == 64);
  CHECK(run_cli("simulate --protocol nope") == 64);
  CHECK(run_cli("frobnicate") == 64);
  CHECK(run_cli("simulate --config " + (dir.path / "missing.conf").string()) == 2);
  CHECK(run_cli("verify --step 0.1") == 1);

  std::ofstream(dir.path / "sweep.conf") << "gamma-steps = 5\nprotocol = bang_bang\n";
  const fs::path out = dir.path / "s.csv";
  CHECK(run_cli("sweep --config " + (dir.path / "sweep.conf").string() + " --gamma-max 4 --output " +
                out.string()) == 0);
  std::ifstream in(out);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == 6);
}
