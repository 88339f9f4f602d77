#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gamow/cli/commands.hpp"

using namespace gamow::cli;

int main(int argc, char **argv) {
  CLI::App app{"Decay of a particle leaking out of a delta-shell well"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  RunConfig config;
  std::string profile = config.profile, times, policy = "auto", format = "csv";

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--lambda", config.lambda, "barrier opacity lambda")->capture_default_str();
    cmd->add_option("--width", config.width, "well width a")->capture_default_str();
    cmd->add_option("--profile", profile, "box:n | gauss:centre,width")->capture_default_str();
    cmd->add_option("--times", times,
                    "start:stop:points-per-decade (geometric) or a single time; "
                    "a 'tau' suffix means multiples of tau_1");
    cmd->add_option("--kmax", config.k_max, "pole cutoff in Re k (<= 0: automatic)");
    cmd->add_option("--policy", policy, "direct | rotated | both | auto")->capture_default_str();
    cmd->add_option("--out", config.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--format", format, "csv | json")->capture_default_str();
  };

  auto *poles = app.add_subcommand("poles", "resonance table");
  auto *evolve = app.add_subcommand("evolve", "wavefunction snapshots on [0, a]");
  auto *survival = app.add_subcommand("survival", "nonescape probability and regime fits");
  auto *report = app.add_subcommand("report", "summary of poles, regimes and crossover");
  for (auto *cmd : {poles, evolve, survival, report})
    add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  try {
    config.profile = profile;
    config.times.text = times;
    config.policy = parse_policy(policy);
    config.format = parse_format(format);

    CommandResult result;
    if (*poles)
      result = cmd_poles(config);
    else if (*evolve)
      result = cmd_evolve(config);
    else if (*survival)
      result = cmd_survival(config);
    else
      result = cmd_report(config);
    std::cout << result.summary << "\n";
    return 0;
  } catch (const std::exception &e) {
    std::cerr << "gamow_lab: " << e.what() << "\n";
    return exit_code(e);
  }
}
