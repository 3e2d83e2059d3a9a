// Command-line front end: seeded norm-synthesis traffic experiments.
//
//   normsim simulate  --scenario {a|b|c} --strategy {uns|iron} [--seed N]
//                     [--steps N] [--runs N] --out DIR [--config FILE]
//   normsim compare   --scenario {a|b|c} [--seed N] [--steps N] [--runs N]
//                     --out DIR [--config FILE]
//   normsim dump-norms --in RUNDIR

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "normsim/harness.hpp"

namespace fs = std::filesystem;
using namespace normsim;

namespace {

struct CommonOpts {
  std::string scenario = "a";
  std::string strategy;
  std::uint64_t seed = 0;
  int steps = 0;
  int runs = 0;
  std::string out;
  std::string config_file;
};

ScenarioConfig build_config(const CommonOpts& opts) {
  ScenarioConfig config = ScenarioConfig::scenario(opts.scenario.at(0));
  if (!opts.config_file.empty())
    config = load_config_file(opts.config_file, config);
  // CLI flags override file values
  if (!opts.strategy.empty())
    config.strategy = strategy_from_string(opts.strategy);
  if (opts.seed != 0) config.seed = opts.seed;
  if (opts.steps != 0) config.max_steps = opts.steps;
  if (opts.runs != 0) config.runs = opts.runs;
  config.validate();
  return config;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_strategy) {
  cmd->add_option("--scenario", opts.scenario, "Scenario preset: a, b or c")
      ->check(CLI::IsMember({"a", "b", "c"}));
  if (with_strategy)
    cmd->add_option("--strategy", opts.strategy, "uns or iron")
        ->check(CLI::IsMember({"uns", "iron"}));
  cmd->add_option("--seed", opts.seed, "Base seed (per-run seeds are seed+i)");
  cmd->add_option("--steps", opts.steps, "Steps per run");
  cmd->add_option("--runs", opts.runs, "Number of seeded runs");
  cmd->add_option("--out", opts.out, "Output directory")->required();
  cmd->add_option("--config", opts.config_file, "Key/value config file");
}

int cmd_simulate(const CommonOpts& opts) {
  ScenarioConfig config = build_config(opts);
  ExperimentReport report = run_experiment(config, opts.out);
  std::cout << "strategy=" << to_string(config.strategy)
            << " mean_avg_waiting=" << report.mean_avg_waiting
            << " mean_total_priority_waiting="
            << report.mean_total_priority_waiting
            << " mean_collisions_per_step=" << report.mean_collisions_per_step
            << " deadlocked_runs=" << report.deadlocked_runs << "\n";
  return 0;
}

int cmd_compare(const CommonOpts& opts) {
  ScenarioConfig config = build_config(opts);
  fs::path out(opts.out);
  config.strategy = Strategy::Uns;
  ExperimentReport uns = run_experiment(config, out / "uns");
  config.strategy = Strategy::Iron;
  ExperimentReport iron = run_experiment(config, out / "iron");
  auto charts = emit_charts(out / "uns", out / "iron", out / "charts");
  std::cout << "uns:  mean_collisions_per_step="
            << uns.mean_collisions_per_step
            << " mean_total_priority_waiting="
            << uns.mean_total_priority_waiting
            << " deadlocked_runs=" << uns.deadlocked_runs << "\n";
  std::cout << "iron: mean_collisions_per_step="
            << iron.mean_collisions_per_step
            << " mean_total_priority_waiting="
            << iron.mean_total_priority_waiting
            << " deadlocked_runs=" << iron.deadlocked_runs << "\n";
  for (const auto& p : charts) std::cout << "chart: " << p.string() << "\n";
  return 0;
}

int cmd_dump_norms(const std::string& in_dir) {
  fs::path dir(in_dir);
  if (!fs::is_directory(dir))
    throw std::runtime_error("not a run directory: " + in_dir);
  bool found = false;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().filename().string().starts_with("norms_run_"))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    found = true;
    std::cout << "# " << file.filename().string() << "\n";
    std::ifstream in(file);
    std::cout << in.rdbuf();
  }
  if (!found)
    throw std::runtime_error("no norm dumps found in " + in_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Norm-synthesis traffic junction simulator"};
  app.require_subcommand(1);

  CommonOpts sim_opts, cmp_opts;
  std::string dump_dir;

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run one strategy and write CSV outputs");
  add_common(simulate, sim_opts, true);

  CLI::App* compare = app.add_subcommand(
      "compare", "Run UNS and IRON on shared spawn streams and render charts");
  add_common(compare, cmp_opts, false);

  CLI::App* dump = app.add_subcommand("dump-norms", "Print stored norm dumps");
  dump->add_option("--in", dump_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(sim_opts);
    if (compare->parsed()) return cmd_compare(cmp_opts);
    if (dump->parsed()) return cmd_dump_norms(dump_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
