#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "asmc/config.hpp"
#include "asmc/errors.hpp"
#include "asmc/experiment.hpp"
#include "asmc/theory.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Annealed SMC samplers with adaptive schedules"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  int workers = -1;
  int replicates = -1;

  CLI::App* run = app.add_subcommand("run", "Run the configured driver and write CSVs");
  run->add_option("--config", config_path, "Path to a key=value config file")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--workers", workers, "Override the config worker count");
  run->add_option("--replicates", replicates, "Override the config replicate count");

  CLI::App* theory =
      app.add_subcommand("theory", "Print the variance model and regime table");
  CLI::App* schema = app.add_subcommand("schema", "Print the CSV headers");

  CLI11_PARSE(app, argc, argv);

  if (theory->parsed()) {
    asmc::theory::print_theory_table(std::cout);
    return 0;
  }
  if (schema->parsed()) {
    std::cout << "summary.csv: " << asmc::kSummaryHeader << '\n'
              << "trace.csv: " << asmc::kTraceHeader << '\n'
              << "schedule.csv: " << asmc::kScheduleHeader << '\n'
              << "barrier.csv: " << asmc::kBarrierHeader << '\n'
              << "pt_trace.csv: " << asmc::kPtTraceHeader << '\n';
    return 0;
  }

  try {
    asmc::RunConfig config = asmc::parse_config(config_path);
    if (seed_opt->count() > 0) config.seed = seed;
    if (workers >= 0) config.workers = workers;
    if (replicates >= 1) config.replicates = replicates;
    config.validate();
    return asmc::run_experiment(config);
  } catch (const asmc::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
