// qsl: simulate protocols, sweep gamma, and run the property suite.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "qsl/commands.hpp"

namespace {

const char* const kValueFlags[] = {"omega",    "gamma",  "gamma-min", "gamma-max", "gamma-steps",
                                   "protocol", "lambda0", "c-factor", "step",      "output",
                                   "format"};

struct Flags {
  std::map<std::string, std::string> values;
  bool log_gamma = false;
  std::string config_path;
};

void add_flags(CLI::App* cmd, Flags& flags) {
  for (const char* name : kValueFlags) {
    cmd->add_option(std::string("--") + name, flags.values[name]);
  }
  cmd->get_option("--protocol")
      ->check(CLI::IsMember({"composite", "composite_unconstrained", "bang_off_bang", "bang_bang"}));
  cmd->get_option("--format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--log-gamma", flags.log_gamma, "logarithmic gamma grid");
  cmd->add_option("--config", flags.config_path, "key = value file; flags override it");
}

// Defaults, then the config file, then explicit flags.
qsl::SweepConfig resolve(const CLI::App* cmd, const Flags& flags) {
  qsl::SweepConfig config;
  if (!flags.config_path.empty()) qsl::cli::load_config_file(flags.config_path, config);
  for (const char* name : kValueFlags) {
    if (cmd->get_option(std::string("--") + name)->count() > 0) {
      qsl::cli::set_config_value(config, name, flags.values.at(name));
    }
  }
  if (flags.log_gamma) config.log_gamma = true;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum speed limit bounds for the driven two-level system"};
  app.require_subcommand(1);

  Flags sim_flags, sweep_flags, verify_flags;
  CLI::App* simulate = app.add_subcommand("simulate", "integrate one protocol and export the trajectory");
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate every bound over a gamma grid");
  CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
  add_flags(simulate, sim_flags);
  add_flags(sweep, sweep_flags);
  add_flags(verify, verify_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qsl::cli::kUsageError;
  }

  try {
    if (simulate->parsed()) {
      return qsl::cli::cmd_simulate(resolve(simulate, sim_flags), std::cout, std::cerr);
    }
    if (sweep->parsed()) {
      return qsl::cli::cmd_sweep(resolve(sweep, sweep_flags), std::cout, std::cerr);
    }
    const qsl::SweepConfig config = resolve(verify, verify_flags);
    qsl::VerifyOptions options;
    options.omega = config.omega;
    options.gamma = config.gamma;
    if (config.lambda0) options.lambda0 = *config.lambda0;
    options.step = config.step;
    const bool protocol_given = verify->get_option("--protocol")->count() > 0 ||
                                config.protocol != qsl::ProtocolKind::composite_unconstrained;
    if (protocol_given) options.protocol = config.protocol;
    return qsl::cli::cmd_verify(options, std::cout, std::cerr);
  } catch (const qsl::cli::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qsl::cli::kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qsl::cli::kUsageError;
  }
}
