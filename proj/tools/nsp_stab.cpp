#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "config.hpp"
#include "nsp/error.hpp"
#include "run.hpp"

int main(int argc, char** argv) {
  using namespace nsp::cli;
  CLI::App app{"Stability experiments for the Navier-Stokes-Poisson steady states"};
  std::string experiment;
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  app.add_option("experiment", experiment, "steady | evolve | decay | verify-elliptic | geometry-check")
      ->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "random seed (overrides seed)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigFailure;
  }

  RunConfig config;
  try {
    if (!known_experiment(experiment))
      throw nsp::Error(nsp::ErrorKind::ConfigError, "unknown experiment '" + experiment + "'");
    config = load_config(config_path);
    if (!config.experiment.empty() && config.experiment != experiment)
      throw nsp::Error(nsp::ErrorKind::ConfigError,
                       "config is for experiment '" + config.experiment + "', not '" + experiment + "'");
  } catch (const nsp::Error& e) {
    std::cerr << "nsp-stab: " << e.what() << "\n";
    return kExitConfigFailure;
  }
  config.experiment = experiment;
  if (out) config.out_dir = *out;
  if (seed) {
    config.seed = *seed;
    config.initial.seed = *seed;
  }
  return execute(config);
}
