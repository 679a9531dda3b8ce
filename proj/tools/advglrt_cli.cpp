// Command-line experiment runner.
//
//   advglrt run <config> [--out file]
//   advglrt predict <config> [--out file]
//   advglrt validate <config>
//   advglrt figure {fig1|fig2|fig3} --out <dir>
//
// Exit codes: 0 ok, 1 configuration error, 2 runtime error.
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "advglrt/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct Overrides {
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--trials", o.trials, "Monte Carlo trials per grid point");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--threads", o.threads, "Worker threads (speed only, never results)")
      ->check(CLI::PositiveNumber);
}

advglrt::ExperimentConfig load(const std::string& path, const Overrides& o) {
  auto config = advglrt::load_config(path);
  if (o.trials) config.n_trials = *o.trials;
  if (o.seed) config.master_seed = *o.seed;
  advglrt::check_config(config);
  return config;
}

void emit(const advglrt::ExperimentConfig& config, const advglrt::RunOptions& options,
          const std::string& out, bool monte_carlo) {
  std::filesystem::path target = out.empty() ? config.output : out;
  if (!target.empty() && target.is_relative() && out.empty()) {
    target = config.base_dir / target;
  }
  if (target.empty()) {
    advglrt::RunOptions o = options;
    o.monte_carlo = monte_carlo;
    advglrt::write_experiment_csv(config, o, std::cout);
    return;
  }
  if (monte_carlo) {
    advglrt::run_experiment(config, options, target);
  } else {
    advglrt::predict(config, options, target);
  }
  std::cerr << "wrote " << target.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarially robust Gaussian hypothesis testing experiments"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path;
  std::string out;

  auto* run = app.add_subcommand("run", "Monte Carlo sweep plus analytical predictions");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--out", out, "Output CSV (default: config 'output' key, else stdout)");
  add_overrides(run, overrides);

  auto* pred = app.add_subcommand("predict", "Analytical predictions only, no sampling");
  pred->add_option("config", config_path, "Experiment config file")->required();
  pred->add_option("--out", out, "Output CSV (default: config 'output' key, else stdout)");
  add_overrides(pred, overrides);

  auto* val = app.add_subcommand("validate", "Check a config and echo resolved parameters");
  val->add_option("config", config_path, "Experiment config file")->required();

  std::string figure_id;
  std::string config_dir = ADVGLRT_CONFIG_DIR;
  auto* fig = app.add_subcommand("figure", "Run a canned figure replication");
  fig->add_option("figure", figure_id, "fig1, fig2 or fig3")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
  fig->add_option("--out", out, "Output directory")->required();
  fig->add_option("--config-dir", config_dir, "Directory holding fig*.cfg");
  add_overrides(fig, overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  advglrt::RunOptions options;
  options.threads = overrides.threads;

  try {
    if (*val) {
      const auto config = advglrt::load_config(config_path);
      const auto report = advglrt::validate_config(config);
      advglrt::print_report(report, std::cout);
      return report.ok ? kOk : kConfigError;
    }
    if (*run || *pred) {
      emit(load(config_path, overrides), options, out, run->parsed());
      return kOk;
    }
    if (*fig) {
      const auto config =
          load((std::filesystem::path(config_dir) / (figure_id + ".cfg")).string(), overrides);
      std::filesystem::create_directories(out);
      const auto target = std::filesystem::path(out) / (figure_id + ".csv");
      advglrt::run_experiment(config, options, target);
      std::cerr << "wrote " << target.string() << '\n';
      return kOk;
    }
  } catch (const advglrt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
