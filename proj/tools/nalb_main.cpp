#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "nalb/harness.hpp"
#include "nalb/presets.hpp"
#include "nalb/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"noise-adaptive linear bandit simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  std::string preset;
  std::uint64_t verify_seed = 1;

  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "config file (JSON)")->required();
  run->add_option("--seed", seed, "override the base seed");
  run->add_option("--out", out_dir, "output directory");

  CLI::App* repro = app.add_subcommand("repro", "run a named preset");
  repro->add_option("preset", preset, "preset name")->required();
  repro->add_option("--trials", trials, "override the trial count");
  repro->add_option("--seed", seed, "override the base seed");
  repro->add_option("--out", out_dir, "output directory");

  CLI::App* verify = app.add_subcommand("verify", "run the self-check suite");
  verify->add_option("--seed", verify_seed, "seed for the checks");

  CLI::App* dump = app.add_subcommand("dump-instance",
                                      "print the trial-0 instance as JSON");
  dump->add_option("--config", config_path, "config file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      nalb::ExperimentConfig config = nalb::load_config_file(config_path);
      if (seed) config.seed = *seed;
      if (!out_dir.empty()) config.out_dir = out_dir;
      nalb::run_experiment(config);
      return 0;
    }
    if (repro->parsed()) {
      if (!nalb::is_preset(preset)) {
        std::cerr << "unknown preset: " << preset << "\n";
        return 1;
      }
      return nalb::run_preset(preset, trials, seed,
                              out_dir.empty() ? "." : out_dir);
    }
    if (verify->parsed()) {
      const nalb::VerifyReport report = nalb::verify_suite(verify_seed, true);
      return report.all_pass() ? 0 : 2;
    }
    if (dump->parsed()) {
      const nalb::ExperimentConfig config = nalb::load_config_file(config_path);
      const nalb::InstanceSpec inst = nalb::build_instance(config, config.seed);
      std::cout << nalb::dump_instance_json(inst) << "\n";
      return 0;
    }
  } catch (const nalb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
