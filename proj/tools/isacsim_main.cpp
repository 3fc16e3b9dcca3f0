// Command-line front end.
//
//   isacsim run <config>       evaluate a scenario, write CSV/JSON results
//   isacsim validate <config>  parse and validate a scenario file
//   isacsim oracle <suite>     run a named self-check suite ("all" runs all)
//
// Exit codes: 0 success, 2 configuration error, 3 every operating point
// infeasible, 4 internal numerical error.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isac/experiment/config.hpp"
#include "isac/experiment/oracle_suites.hpp"
#include "isac/experiment/report.hpp"
#include "isac/experiment/scenario.hpp"
#include "isac/types.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_infeasible = 3;
constexpr int exit_numerical = 4;

isac::experiment::ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw isac::ConfigError("cannot open config file: " + path);
  try {
    return isac::experiment::parse_scenario(in);
  } catch (const isac::ConfigError& e) {
    throw isac::ConfigError(path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Closed-form rate and sensing-accuracy evaluation for dual-function "
      "MIMO downlinks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string suite_name;
  std::string out_dir;
  std::string format = "csv";
  std::optional<std::uint64_t> seed_override;
  int threads = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed_override,
                    "Override the scenario's master seed");
    cmd->add_option("--out-dir", out_dir, "Directory for result files");
    cmd->add_option("--format", format, "Result format: csv, json, or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    cmd->add_option("--threads", threads, "Worker threads (default 1)")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* run_cmd =
      app.add_subcommand("run", "Evaluate a scenario and write results");
  run_cmd->add_option("config", config_path, "Scenario key=value file")
      ->required();
  add_common(run_cmd);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Parse and validate a scenario file");
  validate_cmd->add_option("config", config_path, "Scenario key=value file")
      ->required();

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "Run a named self-check suite");
  oracle_cmd->add_option("suite", suite_name, "Suite name, or 'all'")
      ->required();
  oracle_cmd->add_option("--seed", seed_override, "Self-check random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (validate_cmd->parsed()) {
      const auto sc = load_scenario(config_path);
      std::cout << "ok: scenario '" << sc.id << "', "
                << sc.sweep.size() << " sweep point(s) on "
                << isac::experiment::sweep_axis_name(sc.axis) << ", "
                << sc.schemes.size() << " scheme(s) x " << sc.methods.size()
                << " method(s) x " << sc.large_scale_sets << " set(s)\n";
      return exit_ok;
    }

    if (oracle_cmd->parsed()) {
      const std::uint64_t seed = seed_override.value_or(1);
      const int fails =
          isac::experiment::run_oracle_suite(suite_name, std::cout, seed);
      std::cout << (fails == 0 ? "all checks passed\n"
                               : std::to_string(fails) + " check(s) failed\n");
      return fails == 0 ? exit_ok : exit_numerical;
    }

    // run
    isac::experiment::ScenarioConfig sc = load_scenario(config_path);
    if (seed_override) sc.system.seed = *seed_override;
    const isac::experiment::ScenarioResult result =
        isac::experiment::run_scenario(sc, threads);

    if (format == "csv" || format == "both") {
      const auto path = isac::experiment::write_text_file(
          out_dir, sc.id + ".csv", isac::experiment::render_csv(result.rows));
      std::cout << "wrote " << path.string() << "\n";
    }
    if (format == "json" || format == "both") {
      const auto path = isac::experiment::write_text_file(
          out_dir, sc.id + ".json",
          isac::experiment::render_json(result.rows));
      std::cout << "wrote " << path.string() << "\n";
    }
    std::cout << result.feasible << " feasible row(s), " << result.infeasible
              << " infeasible row(s)\n";
    if (result.feasible == 0) {
      std::cerr << "error: every operating point was infeasible\n";
      return exit_infeasible;
    }
    return exit_ok;
  } catch (const isac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const isac::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return exit_infeasible;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_numerical;
  }
}
