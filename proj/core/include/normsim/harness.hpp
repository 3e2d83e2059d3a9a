#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "normsim/evaluation.hpp"
#include "normsim/reasoning.hpp"
#include "normsim/synthesis.hpp"
#include "normsim/world.hpp"

namespace normsim {

enum class Strategy { Uns, Iron };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);  // throws on junk

struct ScenarioConfig {
  int grid_size = 19;
  int spawn_min = 2;
  int spawn_max = 8;
  int priority_num = 12;
  int priority_den = 100;
  double violation_rate = 0.1;
  Strategy strategy = Strategy::Uns;
  int max_steps = 1000;
  int runs = 10;
  int moving_average_window = 50;
  std::uint64_t seed = 1;
  EvaluationConfig evaluation;
  int deadlock_patience = 20;

  void validate() const;  // throws std::invalid_argument

  // Presets for the three experiments: a = 10% violation, b = 70%, c = 0%.
  static ScenarioConfig scenario(char which);
};

// Key/value config file mirroring ScenarioConfig field names, one
// `key = value` pair per line, '#' comments. Unknown keys are an error.
ScenarioConfig load_config_file(const std::filesystem::path& path,
                                ScenarioConfig base = {});
void apply_config_entry(ScenarioConfig& config, const std::string& key,
                        const std::string& value);

struct MetricsRecord {
  int step = 0;
  double avg_waiting_all = 0.0;
  double total_waiting_priority = 0.0;
  int collisions = 0;
  int active_norms = 0;
  bool deadlocked = false;
};

struct RefinementEvent {
  int step;
  RefinementReport report;
};

// One seeded simulation: world + norm machinery + the per-step loop.
class SimulationRun {
 public:
  SimulationRun(const ScenarioConfig& config, std::uint64_t run_seed);

  MetricsRecord step_once();
  bool deadlocked() const { return deadlocked_; }

  const WorldState& world() const { return world_; }
  WorldState& world_mut() { return world_; }
  const NormSet& norm_set() const { return norms_; }
  const NormGraph& norm_graph() const { return graph_; }
  const NormStatsTracker& tracker() const { return tracker_; }
  const std::vector<RefinementEvent>& refinement_events() const {
    return refinement_events_;
  }

  // Compliance calibration counters: (vehicle, assigned norm) events and
  // how many of them were violated.
  long long norm_events() const { return norm_events_; }
  long long norm_violations() const { return norm_violations_; }
  long long total_collision_events() const { return total_collisions_; }

 private:
  ScenarioConfig config_;
  WorldState world_;
  NormSet norms_;
  NormGraph graph_;
  NormStatsTracker tracker_;
  UtilityFunction utility_;
  SplitMix64 spawn_rng_, compliance_rng_, choice_rng_;
  int zero_movement_streak_ = 0;
  bool deadlocked_ = false;
  long long norm_events_ = 0;
  long long norm_violations_ = 0;
  long long total_collisions_ = 0;
  std::vector<RefinementEvent> refinement_events_;
};

// True once no vehicle has moved for `deadlock_patience` consecutive
// steps while at least one vehicle is active.
bool detect_deadlock(const std::vector<int>& moved_per_step, int active_now,
                     int deadlock_patience);

// Cross-run means; every column fractional.
struct AggregateRecord {
  int step = 0;
  double avg_waiting_all = 0.0;
  double total_waiting_priority = 0.0;
  double collisions = 0.0;
  double active_norms = 0.0;
  double deadlocked = 0.0;  // fraction of deadlocked runs at this step
};

struct RunResult {
  std::vector<MetricsRecord> records;
  bool deadlocked = false;
  int norms_created = 0;
  int norms_active = 0;
  std::vector<std::string> norm_dump;  // textual norms with final NNR/NER
  long long total_collisions = 0;
  long long norm_events = 0;
  long long norm_violations = 0;
};

struct ExperimentReport {
  ScenarioConfig config;
  std::vector<RunResult> runs;
  std::vector<AggregateRecord> aggregate;    // cross-run means per step
  std::vector<AggregateRecord> aggregate_ma; // trailing moving average
  double mean_avg_waiting = 0.0;
  double mean_total_priority_waiting = 0.0;
  double mean_collisions_per_step = 0.0;
  double mean_total_collisions = 0.0;  // per-run mean
  int deadlocked_runs = 0;
};

// Executes config.runs seeded simulations (seed, seed+1, ...), aggregates
// per-step means and the trailing moving average, and when `out_dir` is
// non-empty writes run_<i>.csv, aggregate.csv, aggregate_ma50.csv,
// norms_run_<i>.txt and summary.txt.
ExperimentReport run_experiment(const ScenarioConfig& config,
                                const std::filesystem::path& out_dir = {});

void write_experiment_outputs(const ExperimentReport& report,
                              const std::filesystem::path& out_dir);

// Renders one SVG line chart per metric (avg waiting, priority waiting,
// collisions) overlaying the UNS and IRON smoothed aggregates found in
// `uns_dir` and `iron_dir`. Throws std::runtime_error naming any missing
// or empty input file; never leaves partial outputs behind.
std::vector<std::filesystem::path> emit_charts(
    const std::filesystem::path& uns_dir, const std::filesystem::path& iron_dir,
    const std::filesystem::path& out_dir);

// CSV helpers (exact column order:
// step,avg_waiting_all,total_waiting_priority,collisions,active_norms,deadlocked)
std::string csv_header();
void write_run_csv(const std::filesystem::path& path,
                   const std::vector<MetricsRecord>& records);
void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<AggregateRecord>& records);
std::vector<AggregateRecord> read_aggregate_csv(
    const std::filesystem::path& path);

}  // namespace normsim
