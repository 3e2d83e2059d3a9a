#include "normsim/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace normsim {

namespace fs = std::filesystem;

std::string to_string(Strategy s) {
  return s == Strategy::Uns ? "uns" : "iron";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "uns" || s == "UNS") return Strategy::Uns;
  if (s == "iron" || s == "IRON") return Strategy::Iron;
  throw std::invalid_argument("unknown strategy: " + s);
}

void ScenarioConfig::validate() const {
  if (grid_size < 5) throw std::invalid_argument("grid_size must be >= 5");
  if (spawn_min > spawn_max)
    throw std::invalid_argument("spawn_min must be <= spawn_max");
  if (spawn_min < 0) throw std::invalid_argument("spawn_min must be >= 0");
  if (priority_num < 0 || priority_den <= 0)
    throw std::invalid_argument("priority_ratio must be n:m with m > 0");
  if (violation_rate < 0.0 || violation_rate > 1.0)
    throw std::invalid_argument("violation_rate must lie in [0,1]");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (moving_average_window < 1)
    throw std::invalid_argument("moving_average_window must be >= 1");
  if (deadlock_patience < 1)
    throw std::invalid_argument("deadlock_patience must be >= 1");
  evaluation.validate();
}

ScenarioConfig ScenarioConfig::scenario(char which) {
  ScenarioConfig c;
  switch (which) {
    case 'a': c.violation_rate = 0.10; break;
    case 'b': c.violation_rate = 0.70; break;
    case 'c': c.violation_rate = 0.0; break;
    default:
      throw std::invalid_argument(std::string("unknown scenario: ") + which);
  }
  return c;
}

void apply_config_entry(ScenarioConfig& config, const std::string& key,
                        const std::string& value) {
  auto as_int = [&] { return std::stoi(value); };
  auto as_double = [&] { return std::stod(value); };
  if (key == "grid_size") config.grid_size = as_int();
  else if (key == "spawn_min") config.spawn_min = as_int();
  else if (key == "spawn_max") config.spawn_max = as_int();
  else if (key == "priority_ratio") {
    auto colon = value.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("priority_ratio must look like 12:100");
    config.priority_num = std::stoi(value.substr(0, colon));
    config.priority_den = std::stoi(value.substr(colon + 1));
  } else if (key == "violation_rate") config.violation_rate = as_double();
  else if (key == "strategy") config.strategy = strategy_from_string(value);
  else if (key == "max_steps") config.max_steps = as_int();
  else if (key == "runs") config.runs = as_int();
  else if (key == "moving_average_window")
    config.moving_average_window = as_int();
  else if (key == "seed") config.seed = std::stoull(value);
  else if (key == "deadlock_patience") config.deadlock_patience = as_int();
  else if (key == "evaluation.w_VC") config.evaluation.w_vc = as_double();
  else if (key == "evaluation.w_VnotC") config.evaluation.w_vnc = as_double();
  else if (key == "evaluation.w_AC") config.evaluation.w_ac = as_double();
  else if (key == "evaluation.w_AnotC") config.evaluation.w_anc = as_double();
  else if (key == "evaluation.necessity_threshold")
    config.evaluation.necessity_threshold = as_double();
  else if (key == "evaluation.effectiveness_threshold")
    config.evaluation.effectiveness_threshold = as_double();
  else if (key == "evaluation.T") config.evaluation.refine_interval = as_int();
  else if (key == "evaluation.W") config.evaluation.window = as_int();
  else throw std::invalid_argument("unknown config key: " + key);
}

ScenarioConfig load_config_file(const fs::path& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto strip = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected key = value");
    apply_config_entry(base, strip(line.substr(0, eq)),
                       strip(line.substr(eq + 1)));
  }
  return base;
}

bool detect_deadlock(const std::vector<int>& moved_per_step, int active_now,
                     int deadlock_patience) {
  if (active_now < 1) return false;
  if (static_cast<int>(moved_per_step.size()) < deadlock_patience) return false;
  for (int i = 0; i < deadlock_patience; ++i)
    if (moved_per_step[moved_per_step.size() - 1 - i] != 0) return false;
  return true;
}

namespace {
constexpr std::uint64_t kSpawnStream = 1;
constexpr std::uint64_t kComplianceStream = 2;
constexpr std::uint64_t kChoiceStream = 3;
}  // namespace

SimulationRun::SimulationRun(const ScenarioConfig& config,
                             std::uint64_t run_seed)
    : config_(config),
      world_(RoadMap::standard(config.grid_size)),
      utility_(build_traffic_utility()),
      spawn_rng_(SplitMix64::substream(run_seed, kSpawnStream)),
      compliance_rng_(SplitMix64::substream(run_seed, kComplianceStream)),
      choice_rng_(SplitMix64::substream(run_seed, kChoiceStream)) {
  config_.validate();
}

MetricsRecord SimulationRun::step_once() {
  const int step = world_.time_step();

  // (1) norms reasoning over the current views
  std::map<int, std::vector<int>> bound_norms;  // vehicle -> norm ids
  if (config_.strategy == Strategy::Uns) {
    NormAssignment assignment = resolve_unmatchable(world_, norms_, utility_);
    for (const auto& [vehicle, norm] : assignment.norm_by_vehicle)
      bound_norms[vehicle] = {norm};
  } else {
    // IRON applies every applicable norm directly, no arbitration.
    for (const auto& v : world_.vehicles()) {
      if (!world_.is_active(v)) continue;
      auto apps = norms_.applicable(world_.local_view(v.id));
      if (apps.empty()) continue;
      auto& ids = bound_norms[v.id];
      for (const Norm* n : apps) ids.push_back(n->id);
    }
  }

  // (2) compliance draw, one per bound vehicle per step
  std::map<int, Action> decisions;
  ViewTransition transition;
  transition.before_step = step;
  int active_before = 0;
  for (const auto& v : world_.vehicles()) {
    if (!world_.is_active(v)) continue;
    ++active_before;
    AgentSnapshot snap;
    snap.vehicle_id = v.id;
    snap.view = world_.local_view(v.id);
    snap.position = v.position;
    snap.ahead_cell = world_.forward_target(v);
    Action action = Action::Go;
    if (auto it = bound_norms.find(v.id); it != bound_norms.end()) {
      bool violated = compliance_rng_.bernoulli(config_.violation_rate);
      action = violated ? Action::Go : Action::Stop;
      for (int norm_id : it->second) {
        snap.norm_events.push_back({norm_id, violated});
        norm_events_ += 1;
        if (violated) norm_violations_ += 1;
      }
    }
    snap.decision = action;
    decisions[v.id] = action;
    transition.agents.push_back(std::move(snap));
  }

  // (3) movement
  ApplyResult applied = world_.apply_moves(decisions);

  // (4) conflict detection on the transition
  std::vector<Conflict> conflicts = detect_conflicts(transition);
  total_collisions_ += static_cast<long long>(conflicts.size());

  // (5) synthesis per strategy
  if (config_.strategy == Strategy::Uns)
    synthesize_uns(conflicts, norms_, world_.time_step());
  else
    synthesize_iron(conflicts, norms_, choice_rng_, world_.time_step());

  // (6) evaluation bookkeeping
  auto counts = classify_applications(transition, conflicts);
  tracker_.record_step(counts, norms_, config_.evaluation);

  // (7) refinement at interval boundaries
  if (world_.time_step() % config_.evaluation.refine_interval == 0) {
    RefinementReport report =
        refine(norms_, graph_, tracker_, config_.evaluation,
               world_.time_step());
    if (!report.generalised.empty() || !report.specialised.empty() ||
        !report.deactivated.empty())
      refinement_events_.push_back({world_.time_step(), std::move(report)});
  }

  // deadlock accounting precedes spawning: it concerns vehicles that were
  // present this step
  if (active_before > 0 && applied.moved == 0)
    zero_movement_streak_ += 1;
  else
    zero_movement_streak_ = 0;
  if (zero_movement_streak_ >= config_.deadlock_patience) deadlocked_ = true;

  // (8) spawn
  SpawnSettings spawn{config_.spawn_min, config_.spawn_max,
                      config_.priority_num, config_.priority_den};
  world_.spawn_vehicles(spawn_rng_, spawn);

  // (9) metrics
  MetricsRecord record;
  record.step = step;
  long long waiting_all = world_.exited_waiting_total();
  long long waiting_priority = world_.exited_priority_waiting();
  int vehicles_all = world_.exited_count();
  for (const auto& v : world_.vehicles()) {
    if (!world_.is_active(v)) continue;
    waiting_all += v.waiting_steps;
    vehicles_all += 1;
    if (v.kind == VehicleKind::Priority) waiting_priority += v.waiting_steps;
  }
  record.avg_waiting_all =
      vehicles_all == 0 ? 0.0
                        : static_cast<double>(waiting_all) / vehicles_all;
  record.total_waiting_priority = static_cast<double>(waiting_priority);
  record.collisions = static_cast<int>(conflicts.size());
  record.active_norms = norms_.active_count();
  record.deadlocked = deadlocked_;
  return record;
}

namespace {

RunResult execute_run(const ScenarioConfig& config, std::uint64_t run_seed) {
  SimulationRun sim(config, run_seed);
  RunResult result;
  for (int s = 0; s < config.max_steps; ++s) {
    result.records.push_back(sim.step_once());
    if (sim.deadlocked()) break;
  }
  result.deadlocked = sim.deadlocked();
  result.norms_created = static_cast<int>(sim.norm_set().size());
  result.norms_active = sim.norm_set().active_count();
  result.total_collisions = sim.total_collision_events();
  result.norm_events = sim.norm_events();
  result.norm_violations = sim.norm_violations();
  for (const auto& n : sim.norm_set()) {
    auto fmt_score = [](std::optional<double> v) {
      if (!v) return std::string("undef");
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", *v);
      return std::string(buf);
    };
    std::string line = to_text(n);
    line += n.active ? "  [active]" : "  [inactive]";
    line += "  nnr=" + fmt_score(sim.tracker().necessity_of(
                           n.id, config.evaluation));
    line += " ner=" + fmt_score(sim.tracker().effectiveness_of(
                          n.id, config.evaluation));
    result.norm_dump.push_back(std::move(line));
  }
  return result;
}

}  // namespace

ExperimentReport run_experiment(const ScenarioConfig& config,
                                const fs::path& out_dir) {
  config.validate();
  ExperimentReport report;
  report.config = config;

  std::vector<std::future<RunResult>> futures;
  for (int i = 0; i < config.runs; ++i)
    futures.push_back(std::async(std::launch::async, execute_run, config,
                                 config.seed + static_cast<std::uint64_t>(i)));
  for (auto& f : futures) report.runs.push_back(f.get());

  // per-step cross-run means; terminated runs drop out of the mean but
  // keep counting towards the deadlock fraction
  std::size_t longest = 0;
  for (const auto& r : report.runs) longest = std::max(longest, r.records.size());
  for (std::size_t s = 0; s < longest; ++s) {
    AggregateRecord agg;
    agg.step = static_cast<int>(s);
    int live = 0, deadlocked = 0;
    for (const auto& r : report.runs) {
      bool dead_by_now =
          r.deadlocked && s >= r.records.size() - (r.records.empty() ? 0 : 1);
      if (dead_by_now) ++deadlocked;
      if (s >= r.records.size()) continue;
      const MetricsRecord& m = r.records[s];
      agg.avg_waiting_all += m.avg_waiting_all;
      agg.total_waiting_priority += m.total_waiting_priority;
      agg.collisions += m.collisions;
      agg.active_norms += m.active_norms;
      ++live;
    }
    if (live == 0) break;
    agg.avg_waiting_all /= live;
    agg.total_waiting_priority /= live;
    agg.collisions /= live;
    agg.active_norms /= live;
    agg.deadlocked = static_cast<double>(deadlocked) / config.runs;
    report.aggregate.push_back(agg);
  }

  // trailing (causal) moving average
  const int w = config.moving_average_window;
  AggregateRecord sum;
  std::vector<AggregateRecord> window;
  for (std::size_t s = 0; s < report.aggregate.size(); ++s) {
    const AggregateRecord& cur = report.aggregate[s];
    sum.avg_waiting_all += cur.avg_waiting_all;
    sum.total_waiting_priority += cur.total_waiting_priority;
    sum.collisions += cur.collisions;
    sum.active_norms += cur.active_norms;
    sum.deadlocked += cur.deadlocked;
    window.push_back(cur);
    if (static_cast<int>(window.size()) > w) {
      const AggregateRecord& old = window.front();
      sum.avg_waiting_all -= old.avg_waiting_all;
      sum.total_waiting_priority -= old.total_waiting_priority;
      sum.collisions -= old.collisions;
      sum.active_norms -= old.active_norms;
      sum.deadlocked -= old.deadlocked;
      window.erase(window.begin());
    }
    double n = static_cast<double>(window.size());
    AggregateRecord ma;
    ma.step = cur.step;
    ma.avg_waiting_all = sum.avg_waiting_all / n;
    ma.total_waiting_priority = sum.total_waiting_priority / n;
    ma.collisions = sum.collisions / n;
    ma.active_norms = sum.active_norms / n;
    ma.deadlocked = sum.deadlocked / n;
    report.aggregate_ma.push_back(ma);
  }

  // summary statistics over the aggregate
  double steps = static_cast<double>(report.aggregate.size());
  for (const auto& a : report.aggregate) {
    report.mean_avg_waiting += a.avg_waiting_all;
    report.mean_total_priority_waiting += a.total_waiting_priority;
    report.mean_collisions_per_step += a.collisions;
  }
  if (steps > 0) {
    report.mean_avg_waiting /= steps;
    report.mean_total_priority_waiting /= steps;
    report.mean_collisions_per_step /= steps;
  }
  for (const auto& r : report.runs) {
    report.mean_total_collisions += static_cast<double>(r.total_collisions);
    if (r.deadlocked) report.deadlocked_runs += 1;
  }
  report.mean_total_collisions /= static_cast<double>(config.runs);

  if (!out_dir.empty()) write_experiment_outputs(report, out_dir);
  return report;
}

std::string csv_header() {
  return "step,avg_waiting_all,total_waiting_priority,collisions,"
         "active_norms,deadlocked";
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write output file: " + path.string());
  return out;
}

}  // namespace

void write_run_csv(const fs::path& path,
                   const std::vector<MetricsRecord>& records) {
  std::ofstream out = open_out(path);
  out << csv_header() << "\n";
  char buf[160];
  for (const auto& m : records) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%d,%d,%d\n", m.step,
                  m.avg_waiting_all, m.total_waiting_priority, m.collisions,
                  m.active_norms, m.deadlocked ? 1 : 0);
    out << buf;
  }
}

void write_aggregate_csv(const fs::path& path,
                         const std::vector<AggregateRecord>& records) {
  std::ofstream out = open_out(path);
  out << csv_header() << "\n";
  char buf[200];
  for (const auto& a : records) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", a.step,
                  a.avg_waiting_all, a.total_waiting_priority, a.collisions,
                  a.active_norms, a.deadlocked);
    out << buf;
  }
}

std::vector<AggregateRecord> read_aggregate_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing input CSV: " + path.string());
  std::vector<AggregateRecord> records;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    AggregateRecord a;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    if (!(ss >> a.step >> a.avg_waiting_all >> a.total_waiting_priority >>
          a.collisions >> a.active_norms >> a.deadlocked))
      throw std::runtime_error("malformed CSV row in " + path.string());
    records.push_back(a);
  }
  return records;
}

void write_experiment_outputs(const ExperimentReport& report,
                              const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec && !fs::is_directory(out_dir))
    throw std::runtime_error("cannot create output directory: " +
                             out_dir.string());
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    write_run_csv(out_dir / ("run_" + std::to_string(i) + ".csv"),
                  report.runs[i].records);
    std::ofstream norms =
        open_out(out_dir / ("norms_run_" + std::to_string(i) + ".txt"));
    for (const auto& line : report.runs[i].norm_dump) norms << line << "\n";
  }
  write_aggregate_csv(out_dir / "aggregate.csv", report.aggregate);
  write_aggregate_csv(out_dir / "aggregate_ma50.csv", report.aggregate_ma);

  std::ofstream summary = open_out(out_dir / "summary.txt");
  char buf[160];
  summary << "strategy=" << to_string(report.config.strategy) << "\n";
  summary << "runs=" << report.config.runs << "\n";
  std::snprintf(buf, sizeof(buf), "mean_avg_waiting=%.6f\n",
                report.mean_avg_waiting);
  summary << buf;
  std::snprintf(buf, sizeof(buf), "mean_total_priority_waiting=%.6f\n",
                report.mean_total_priority_waiting);
  summary << buf;
  std::snprintf(buf, sizeof(buf), "mean_collisions_per_step=%.6f\n",
                report.mean_collisions_per_step);
  summary << buf;
  std::snprintf(buf, sizeof(buf), "mean_total_collisions=%.6f\n",
                report.mean_total_collisions);
  summary << buf;
  summary << "deadlocked_runs=" << report.deadlocked_runs << "\n";
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    summary << "run_" << i << ".deadlocked="
            << (report.runs[i].deadlocked ? 1 : 0) << "\n";
    summary << "run_" << i << ".norms_created="
            << report.runs[i].norms_created << "\n";
    summary << "run_" << i << ".total_collisions="
            << report.runs[i].total_collisions << "\n";
  }
}

}  // namespace normsim
