#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "zoadmm/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order stochastic ADMM benchmark runner"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::size_t jobs = 1;

  auto* run = app.add_subcommand("run", "Execute every (algorithm, seed) pair of an experiment");
  run->add_option("--config", config, "Experiment file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides run.output_dir)");
  run->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Parse and check a config without running it");
  validate->add_option("--config", config, "Experiment file")->required();

  auto* derive = app.add_subcommand("derive", "Print the derived hyperparameters as JSON");
  derive->add_option("--config", config, "Experiment file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : zoadmm::kExitConfigError;
  }

  if (*run) {
    std::optional<std::filesystem::path> out;
    if (!out_dir.empty()) out = out_dir;
    return zoadmm::run_experiment(config, out, jobs, std::cerr);
  }
  if (*validate) return zoadmm::validate_experiment(config, std::cerr);
  return zoadmm::derive_experiment(config, std::cout);
}
