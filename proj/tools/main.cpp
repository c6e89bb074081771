#include "pekar/config.hpp"
#include "pekar/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  int workers = 0;
  bool strict = false;
  std::uint64_t seed = 0;
  CLI::Option* out_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    out_opt = cmd->add_option("--out", out, "output directory (overrides output_dir)");
    workers_opt = cmd->add_option("--workers", workers, "concurrent solves (overrides workers)")->check(CLI::PositiveNumber);
    cmd->add_flag("--strict", strict, "exit 3 if any solve fails to converge");
    seed_opt = cmd->add_option("--seed", seed, "RNG seed (overrides seed)");
  }

  pekar::ConfigOverrides overrides() const {
    pekar::ConfigOverrides o;
    if (*out_opt) o.output_dir = out;
    if (*workers_opt) o.workers = workers;
    if (*seed_opt) o.rng_seed = seed;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational solvers for the Pekar functional with external potentials"};
  app.require_subcommand(1);

  CommonFlags run_flags, validate_flags;
  CLI::App* run = app.add_subcommand("run", "validate the config, run the experiment and write artifacts");
  run_flags.attach(run);
  CLI::App* validate = app.add_subcommand("validate", "check the config and print derived quantities");
  validate_flags.attach(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pekar::exit_invalid;
  }

  const CommonFlags& flags = run->parsed() ? run_flags : validate_flags;
  pekar::ExperimentConfig cfg;
  try {
    cfg = pekar::load_config(flags.config, flags.overrides());
    if (validate->parsed()) {
      pekar::describe_config(cfg, std::cout);
      return pekar::exit_ok;
    }
    pekar::validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return pekar::exit_invalid;
  }

  try {
    const pekar::RunSummary s = pekar::run_experiment(cfg, flags.strict, std::cout);
    std::cout << "wrote " << s.artifacts.size() << " artifacts to " << cfg.output_dir << " in " << s.wall_seconds << " s\n";
    if (s.exit_code == pekar::exit_not_converged) std::cerr << "strict mode: a solve did not converge\n";
    return s.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pekar::exit_failure;
  }
}
