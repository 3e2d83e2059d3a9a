// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failed criteria. Scenario criteria run the full default experiments, so
// this binary takes a few minutes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "normsim/evaluation.hpp"
#include "normsim/harness.hpp"
#include "normsim/reasoning.hpp"
#include "normsim/synthesis.hpp"

using namespace normsim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s — %s\n", criterion, ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

bool close(double got, double expected) {
  return std::abs(got - expected) <=
         1e-12 * std::max(1.0, std::abs(expected));
}

NormStats stats_of(int vc, int vnc, int ac, int anc) {
  NormStats s;
  s.totals.violated_conflict = vc;
  s.totals.violated_no_conflict = vnc;
  s.totals.applied_conflict = ac;
  s.totals.applied_no_conflict = anc;
  return s;
}

ProjectedState make_state(const std::vector<double>& ordinary,
                          const std::vector<double>& priority) {
  ProjectedState s;
  for (double w : ordinary) s.vehicles.push_back({VehicleKind::Ordinary, w});
  for (double w : priority) s.vehicles.push_back({VehicleKind::Priority, w});
  return s;
}

// ---------------------------------------------------------------- 1
void criterion_1() {
  auto start = Clock::now();
  int failures = 0;

  struct NnrCase {
    int vc, vnc;
    double wvc, wvnc, expected;
  };
  const std::vector<NnrCase> nnr_cases = {
      {3, 1, 1, 1, 0.75},        {0, 5, 1, 1, 0.0},
      {2, 2, 2, 1, 4.0 / 6.0},   {1, 0, 1, 1, 1.0},
      {5, 5, 1, 1, 0.5},         {1, 3, 1, 1, 0.25},
      {2, 1, 3, 1, 6.0 / 7.0},   {4, 1, 1, 2, 4.0 / 6.0},
      {7, 3, 1, 1, 0.7},         {1, 1, 5, 5, 0.5},
      {9, 1, 1, 1, 0.9},
  };
  for (const auto& c : nnr_cases) {
    EvaluationConfig cfg;
    cfg.w_vc = c.wvc;
    cfg.w_vnc = c.wvnc;
    auto got = necessity(stats_of(c.vc, c.vnc, 0, 0), cfg);
    if (!got || !close(*got, c.expected)) ++failures;
  }

  struct NerCase {
    int ac, anc;
    double wac, wanc, expected;
  };
  const std::vector<NerCase> ner_cases = {
      {0, 4, 1, 1, 1.0},         {4, 0, 1, 1, 0.0},
      {1, 3, 1, 1, 0.75},        {2, 2, 1, 1, 0.5},
      {3, 1, 1, 1, 0.25},        {1, 1, 2, 1, 1.0 / 3.0},
      {1, 4, 1, 2, 8.0 / 9.0},   {5, 5, 2, 2, 0.5},
      {2, 6, 1, 1, 0.75},        {1, 9, 1, 1, 0.9},
      {3, 2, 1, 3, 2.0 / 3.0},
  };
  for (const auto& c : ner_cases) {
    EvaluationConfig cfg;
    cfg.w_ac = c.wac;
    cfg.w_anc = c.wanc;
    auto got = effectiveness(stats_of(0, 0, c.ac, c.anc), cfg);
    if (!got || !close(*got, c.expected)) ++failures;
  }

  UtilityFunction u = build_traffic_utility();
  struct UCase {
    std::vector<double> ordinary, priority;
    double expected;
  };
  const std::vector<UCase> u_cases = {
      {{4, 3, 2, 1, 0}, {2, 2}, -6.0},
      {{}, {}, 0.0},
      {{0, 0, 0}, {0}, 0.0},
      {{}, {3}, -6.0},
      {{1, 2, 3}, {}, -2.0},
      {{2}, {}, -2.0},
      {{}, {1, 1}, -3.0},
      {{10}, {5}, -12.5},
      {{0}, {4}, -6.0},
      {{1, 1, 1, 1}, {0}, -0.8},
      {{6, 4}, {0, 0}, -2.5},
  };
  for (const auto& c : u_cases)
    if (!close(u.value(make_state(c.ordinary, c.priority)), c.expected))
      ++failures;

  double elapsed = seconds_since(start);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "formula suite: %d/33 hand cases failed, %.3fs (budget 1s)",
                failures, elapsed);
  report(1, failures == 0 && elapsed < 1.0, buf);
}

// ---------------------------------------------------------------- 2 & 3
struct Pair {
  ExperimentReport uns, iron;
  double elapsed;
};

Pair run_pair(char scenario) {
  auto start = Clock::now();
  ScenarioConfig config = ScenarioConfig::scenario(scenario);
  Pair p;
  config.strategy = Strategy::Uns;
  p.uns = run_experiment(config);
  config.strategy = Strategy::Iron;
  p.iron = run_experiment(config);
  p.elapsed = seconds_since(start);
  return p;
}

void criterion_2(const Pair& a) {
  bool coll_lower =
      a.uns.mean_collisions_per_step < a.iron.mean_collisions_per_step;
  bool coll_ratio =
      a.uns.mean_total_collisions <= 0.7 * a.iron.mean_total_collisions;
  bool prio =
      a.uns.mean_total_priority_waiting <= a.iron.mean_total_priority_waiting;
  char buf[320];
  std::snprintf(
      buf, sizeof(buf),
      "scenario A: collisions/step uns=%.3f iron=%.3f (lower:%s), total "
      "collisions uns=%.1f vs 0.7*iron=%.1f (%s), priority waiting uns=%.1f "
      "iron=%.1f (%s), %.1fs (budget 120s)",
      a.uns.mean_collisions_per_step, a.iron.mean_collisions_per_step,
      coll_lower ? "yes" : "no", a.uns.mean_total_collisions,
      0.7 * a.iron.mean_total_collisions, coll_ratio ? "ok" : "violated",
      a.uns.mean_total_priority_waiting, a.iron.mean_total_priority_waiting,
      prio ? "ok" : "violated", a.elapsed);
  report(2, coll_lower && coll_ratio && prio && a.elapsed < 120.0, buf);
}

void criterion_3(const Pair& b) {
  bool avg = b.uns.mean_avg_waiting <= b.iron.mean_avg_waiting;
  bool prio =
      b.uns.mean_total_priority_waiting <= b.iron.mean_total_priority_waiting;
  bool coll =
      b.uns.mean_collisions_per_step <= b.iron.mean_collisions_per_step;
  char buf[320];
  std::snprintf(
      buf, sizeof(buf),
      "scenario B: avg waiting uns=%.2f iron=%.2f (%s), priority waiting "
      "uns=%.1f iron=%.1f (%s), collisions/step uns=%.3f iron=%.3f (%s), "
      "%.1fs (budget 120s)",
      b.uns.mean_avg_waiting, b.iron.mean_avg_waiting, avg ? "ok" : "violated",
      b.uns.mean_total_priority_waiting, b.iron.mean_total_priority_waiting,
      prio ? "ok" : "violated", b.uns.mean_collisions_per_step,
      b.iron.mean_collisions_per_step, coll ? "ok" : "violated", b.elapsed);
  report(3, avg && prio && coll && b.elapsed < 120.0, buf);
}

void criterion_4(const Pair& c) {
  bool iron_dead = c.iron.deadlocked_runs >= 8;
  bool uns_live = c.uns.deadlocked_runs == 0;
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "scenario C dichotomy: iron deadlocked %d/10 (need >=8), uns "
                "deadlocked %d/10 (need 0), %.1fs (budget 120s)",
                c.iron.deadlocked_runs, c.uns.deadlocked_runs, c.elapsed);
  report(4, iron_dead && uns_live && c.elapsed < 120.0, buf);
}

void criterion_5(const Pair& c) {
  bool count_ok = true;
  int bad_run = -1;
  for (std::size_t i = 0; i < c.uns.runs.size(); ++i)
    if (c.uns.runs[i].norms_created < c.iron.runs[i].norms_created) {
      count_ok = false;
      bad_run = static_cast<int>(i);
    }
  bool orientations = true;
  for (const auto& run : c.uns.runs) {
    bool left = false, right = false;
    for (const auto& line : run.norm_dump) {
      if (line.find("left(<)") != std::string::npos) left = true;
      if (line.find("right(>)") != std::string::npos) right = true;
    }
    if (!left || !right) orientations = false;
  }
  std::ostringstream detail;
  detail << "fairness (paired scenario-C runs): uns norm counts";
  for (const auto& run : c.uns.runs) detail << ' ' << run.norms_created;
  detail << " vs iron";
  for (const auto& run : c.iron.runs) detail << ' ' << run.norms_created;
  if (!count_ok) detail << " (run " << bad_run << " below iron)";
  detail << "; both orientations in every uns dump: "
         << (orientations ? "yes" : "no");
  report(5, count_ok && orientations, detail.str());
}

// ---------------------------------------------------------------- 6
std::set<int> oracle_affected(const WorldState& world, int head) {
  std::set<int> members{head};
  bool grew = true;
  while (grew) {
    grew = false;
    std::set<Position> cells;
    for (int id : members) cells.insert(world.find(id)->position);
    for (const auto& v : world.vehicles()) {
      if (!world.is_active(v) || members.count(v.id)) continue;
      if (cells.count(step_from(v.position, v.heading))) {
        members.insert(v.id);
        grew = true;
      }
    }
  }
  return members;
}

double oracle_utility(const WorldState& world, int head) {
  std::set<int> blocked = oracle_affected(world, head);
  double total = 0.0, priority = 0.0;
  int count = 0;
  for (const auto& v : world.vehicles()) {
    if (!world.is_active(v)) continue;
    double w = v.waiting_steps + (blocked.count(v.id) ? 1.0 : 0.0);
    total += w;
    if (v.kind == VehicleKind::Priority) priority += w;
    ++count;
  }
  if (count == 0) return 0.0;
  return -(total / count) - priority;
}

void criterion_6() {
  auto start = Clock::now();
  SplitMix64 rng(2024);
  UtilityFunction utility = build_traffic_utility();
  int worlds = 0, mismatches = 0;
  while (worlds < 200) {
    WorldState world(RoadMap::standard());
    std::vector<int> ids;
    int n = rng.range(1, 8);
    for (int i = 0; i < n; ++i) {
      Position p{rng.range(0, 18), rng.range(0, 18)};
      if (world.occupant(p)) continue;
      VehicleKind kind =
          rng.bernoulli(0.3) ? VehicleKind::Priority : VehicleKind::Ordinary;
      Vehicle& v =
          world.place_vehicle(kind, p, kAllHeadings[rng.below(4)], {0, 0});
      v.waiting_steps = rng.range(0, 5);
      ids.push_back(v.id);
    }
    if (ids.empty()) continue;
    ++worlds;
    int head = ids[rng.below(static_cast<std::uint32_t>(ids.size()))];
    NormSet norms;
    int wild = norms.add(Precondition{{}, {}, {}}, 0).id;
    if (affected_set(world, head) != oracle_affected(world, head))
      ++mismatches;
    if (accumulated_utility(world, utility, norms, head, wild) !=
        oracle_utility(world, head))
      ++mismatches;
  }
  double elapsed = seconds_since(start);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "oracle equivalence: %d mismatches over 200 random worlds, "
                "%.2fs (budget 10s)",
                mismatches, elapsed);
  report(6, mismatches == 0 && elapsed < 10.0, buf);
}

// ---------------------------------------------------------------- 7
std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool prop_determinism(std::string& why) {
  ScenarioConfig config = ScenarioConfig::scenario('a');
  config.runs = 2;
  config.max_steps = 60;
  config.seed = 21;
  fs::path base = fs::temp_directory_path() / "normsim_acceptance";
  fs::remove_all(base);
  run_experiment(config, base / "one");
  run_experiment(config, base / "two");
  for (const char* name : {"run_0.csv", "run_1.csv", "aggregate.csv",
                           "aggregate_ma50.csv"}) {
    if (slurp(base / "one" / name) != slurp(base / "two" / name)) {
      why = std::string("rerun differs in ") + name;
      return false;
    }
  }
  return true;
}

bool prop_calibration(std::string& why) {
  for (Strategy strategy : {Strategy::Uns, Strategy::Iron}) {
    ScenarioConfig config = ScenarioConfig::scenario('a');
    config.strategy = strategy;
    SimulationRun sim(config, 3);
    for (int step = 0; step < 600; ++step) sim.step_once();
    if (sim.norm_events() == 0) {
      why = "no norm events recorded";
      return false;
    }
    double rate = static_cast<double>(sim.norm_violations()) /
                  static_cast<double>(sim.norm_events());
    if (std::abs(rate - config.violation_rate) >= 0.02) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%s rate %.4f vs 0.10",
                    to_string(strategy).c_str(), rate);
      why = buf;
      return false;
    }
  }
  return true;
}

bool prop_generalisation_soundness(std::string& why) {
  NormSet set;
  NormGraph graph;
  auto ground = [](CellDescriptor l, CellDescriptor f, CellDescriptor r) {
    return Precondition{{l}, {f}, {r}};
  };
  using CD = CellDescriptor;
  std::vector<int> g1{set.add(ground(CD::Empty, CD::Empty, CD::HeadingFromRight), 0).id,
                      set.add(ground(CD::SameHeading, CD::Empty, CD::HeadingFromRight), 0).id};
  std::vector<int> g2{set.add(ground(CD::Empty, CD::SameHeading, CD::HeadingFromRight), 0).id,
                      set.add(ground(CD::SameHeading, CD::SameHeading, CD::HeadingFromRight), 0).id};
  int p1 = generalize(graph, set, g1, 0).id;
  int p2 = generalize(graph, set, g2, 0).id;
  std::vector<int> ps{p1, p2};
  int grand = generalize(graph, set, ps, 0).id;
  std::vector<std::pair<int, int>> edges;
  for (int child : g1) edges.push_back({p1, child});
  for (int child : g2) edges.push_back({p2, child});
  edges.push_back({grand, p1});
  edges.push_back({grand, p2});
  for (CellDescriptor l : kAllDescriptors)
    for (CellDescriptor f : kAllDescriptors)
      for (CellDescriptor r : kAllDescriptors) {
        LocalView view{l, f, r};
        for (const auto& [parent, child] : edges)
          if (set.find(child)->precondition.matches(view) &&
              !set.find(parent)->precondition.matches(view)) {
            why = "child matched a view its parent misses";
            return false;
          }
      }
  return true;
}

bool prop_four_set_partition(std::string& why) {
  SplitMix64 rng(4004);
  for (int trial = 0; trial < 40; ++trial) {
    ViewTransition tr;
    int events = 0;
    for (int id = 0; id < 10; ++id) {
      bool violated = rng.bernoulli(0.5);
      AgentSnapshot a;
      a.vehicle_id = id;
      a.position = {id, 0};
      a.ahead_cell = {rng.range(0, 2), rng.range(0, 2)};
      a.decision = violated ? Action::Go : Action::Stop;
      int bound = rng.range(0, 2);
      for (int k = 0; k < bound; ++k) {
        a.norm_events.push_back({rng.range(0, 4), violated});
        ++events;
      }
      tr.agents.push_back(a);
    }
    auto counts = classify_applications(tr, detect_conflicts(tr));
    int total = 0;
    for (const auto& [norm, c] : counts)
      total += c.applied_conflict + c.applied_no_conflict +
               c.violated_conflict + c.violated_no_conflict;
    if (total != events) {
      why = "counter total diverged from event count";
      return false;
    }
  }
  return true;
}

WorldState junction_scene(int& a, int& b) {
  WorldState world(RoadMap::standard());
  a = world.place_vehicle(VehicleKind::Ordinary, {9, 8}, Heading::East,
                          {9, 18})
          .id;
  for (int i = 0; i < 3; ++i)
    world.place_vehicle(VehicleKind::Ordinary, {9, 7 - i}, Heading::East,
                        {9, 18});
  b = world.place_vehicle(VehicleKind::Ordinary, {8, 9}, Heading::South,
                          {18, 9})
          .id;
  world.place_vehicle(VehicleKind::Priority, {7, 9}, Heading::South, {18, 9});
  return world;
}

bool prop_one_per_group(std::string& why) {
  int a, b;
  WorldState world = junction_scene(a, b);
  NormSet norms;
  norms.add(Precondition::ground(world.local_view(a)), 0);
  norms.add(Precondition::ground(world.local_view(b)), 0);
  UtilityFunction utility = build_traffic_utility();
  NormAssignment assignment = resolve_unmatchable(world, norms, utility);
  int assigned = static_cast<int>(assignment.norm_by_vehicle.count(a)) +
                 static_cast<int>(assignment.norm_by_vehicle.count(b));
  if (assigned != 1) {
    why = "contention group received " + std::to_string(assigned) + " norms";
    return false;
  }
  return true;
}

bool prop_argmax_invariance(std::string& why) {
  int a, b;
  WorldState world = junction_scene(a, b);
  NormSet norms;
  norms.add(Precondition::ground(world.local_view(a)), 0);
  norms.add(Precondition::ground(world.local_view(b)), 0);
  UtilityFunction utility = build_traffic_utility();
  NormAssignment base = resolve_unmatchable(world, norms, utility);
  UtilityFunction scaled = utility;
  for (auto& term : scaled.terms) term.weight *= 13.5;
  NormAssignment rescaled = resolve_unmatchable(world, norms, scaled);
  if (base.norm_by_vehicle != rescaled.norm_by_vehicle) {
    why = "assignment changed under positive scaling";
    return false;
  }
  return true;
}

bool prop_projection_purity(std::string& why) {
  int a, b;
  WorldState world = junction_scene(a, b);
  NormSet norms;
  int na = norms.add(Precondition::ground(world.local_view(a)), 0).id;
  UtilityFunction utility = build_traffic_utility();
  std::uint64_t before = world.state_hash();
  for (int i = 0; i < 50; ++i)
    (void)accumulated_utility(world, utility, norms, a, na);
  if (world.state_hash() != before) {
    why = "state hash moved across projections";
    return false;
  }
  return true;
}

void criterion_7() {
  auto start = Clock::now();
  struct Prop {
    const char* name;
    bool (*fn)(std::string&);
  };
  const std::vector<Prop> props = {
      {"determinism", prop_determinism},
      {"violation calibration", prop_calibration},
      {"generalisation soundness", prop_generalisation_soundness},
      {"four-set partition", prop_four_set_partition},
      {"one-per-group", prop_one_per_group},
      {"argmax invariance", prop_argmax_invariance},
      {"projection purity", prop_projection_purity},
  };
  std::string failed;
  for (const auto& prop : props) {
    std::string why;
    if (!prop.fn(why)) {
      if (!failed.empty()) failed += "; ";
      failed += std::string(prop.name) + " (" + why + ")";
    }
  }
  double elapsed = seconds_since(start);
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "property suite: %s, %.1fs (budget 30s)",
                failed.empty() ? "all 7 properties hold" : failed.c_str(),
                elapsed);
  report(7, failed.empty() && elapsed < 30.0, buf);
}

}  // namespace

int main() {
  criterion_1();
  Pair a = run_pair('a');
  criterion_2(a);
  Pair b = run_pair('b');
  criterion_3(b);
  Pair c = run_pair('c');
  criterion_4(c);
  criterion_5(c);
  criterion_6();
  criterion_7();
  std::printf("%d of 7 criteria failed\n", g_failures);
  return g_failures;
}
