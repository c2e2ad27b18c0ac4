#include <CLI11.hpp>
#include <fmt/format.h>

#include <exception>

#include "ries/runner.hpp"

using ries::RunOptions;

int main(int argc, char** argv) {
  CLI::App app{"rural integrated energy system optimizer"};
  app.require_subcommand(1);
  RunOptions opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "system configuration file")
        ->capture_default_str();
    sub->add_option("--out", opt.out_root, "output root directory")
        ->capture_default_str();
    sub->add_option("--seed", opt.seed, "override the config RNG seed");
  };

  CLI::App* scn = app.add_subcommand(
      "scenarios", "solve the four study cases and tabulate costs/emissions");
  add_common(scn);

  CLI::App* bil = app.add_subcommand(
      "bilevel", "search grid selling prices against the park's dispatch response");
  add_common(bil);
  bil->add_option("--scenario", opt.scenario, "lower-level scenario 1..4")
      ->check(CLI::Range(1, 4))
      ->capture_default_str();
  bil->add_option("--ga-generations", opt.ga_generations, "generation cap");
  bil->add_option("--ga-pop", opt.ga_population, "population size");
  bil->add_option("--ga-mutation", opt.ga_mutation, "per-gene mutation rate");

  CLI::App* sen = app.add_subcommand(
      "sensitivity", "one-at-a-time carbon sensitivity sweeps (27 parameters)");
  add_common(sen);
  sen->add_option("--params", opt.params, "all or comma-separated ids, e.g. F1,F5")
      ->capture_default_str();
  sen->add_option("--samples", opt.samples, "samples per parameter (>= 3)");

  CLI::App* val = app.add_subcommand("validate", "lint a configuration and exit");
  val->add_option("--config", opt.config_path, "system configuration file")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (scn->parsed()) return ries::run_scenarios(opt);
    if (bil->parsed()) return ries::run_bilevel(opt);
    if (sen->parsed()) return ries::run_sensitivity_cmd(opt);
    if (val->parsed()) return ries::run_validate(opt);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
