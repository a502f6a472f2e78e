#include <iostream>

#include <CLI11.hpp>

#include "salab/commands.hpp"

int main(int argc, char** argv)
{
  using namespace salab;

  CLI::App app{"Stochastic approximation lock-in laboratory"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);

  std::string config_path;
  RunOverrides overrides;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", overrides.seed, "master seed override");
    sub->add_option("--out", overrides.output_dir, "output directory override");
    sub->add_option("--jobs", overrides.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const ExperimentConfig config = apply_overrides(load_config(config_path), overrides);
    const RunManifest m = run_command(command, config);
    std::cout << command << ": " << (m.status == ExitCode::ok ? "ok" : "verdict failure") << " (" << m.output_dir
              << "/report.txt)\n";
    return static_cast<int>(m.status);
  } catch (const std::exception& e) {
    std::cerr << "salab " << command << ": " << e.what() << '\n';
    return static_cast<int>(exit_code_for(e));
  }
}
