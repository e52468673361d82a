#include "saem/experiment.hpp"
#include "saem/io/config.hpp"

#include <CLI11.hpp>

#include <string>

int main(int argc, char** argv) {
  CLI::App app{"SAEM: stochastic-approximation EM estimation for incomplete-data models"};
  app.require_subcommand(1);
  app.footer(saem::io::config_reference() +
             "\nThe environment variable SAEM_SEED overrides saem.seed.");

  std::string config_path;
  int jobs = 1;

  CLI::App* cmd_run = app.add_subcommand("run", "run the configured experiment");
  cmd_run->add_option("config", config_path, "experiment config file")->required();
  cmd_run->add_option("--jobs", jobs, "max replications running in parallel")
      ->default_val(1)
      ->check(CLI::PositiveNumber);

  CLI::App* cmd_validate =
      app.add_subcommand("validate", "finite-difference model consistency checks only");
  cmd_validate->add_option("config", config_path, "experiment config file")->required();

  CLI::App* cmd_oracle =
      app.add_subcommand("oracle", "run the exact reference oracle (direct MLE + EM fixed point)");
  cmd_oracle->add_option("config", config_path, "experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad usage is a configuration error
  }

  if (cmd_run->parsed()) return saem::run_experiment(config_path, jobs);
  if (cmd_validate->parsed()) return saem::run_validate(config_path);
  return saem::run_oracle(config_path);
}
