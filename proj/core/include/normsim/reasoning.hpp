#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "normsim/norms.hpp"
#include "normsim/world.hpp"

namespace normsim {

// Per-vehicle projected totals for a hypothetical next state.
struct ProjectedState {
  struct Entry {
    VehicleKind kind;
    double projected_waiting;
  };
  std::vector<Entry> vehicles;
};

enum class Sense { Maximise, Minimise };

struct ObjectiveTerm {
  std::string name;
  Sense sense = Sense::Minimise;
  double weight = 1.0;
  double (*evaluator)(const ProjectedState&) = nullptr;
};

// value = sum over terms of sign(sense) * weight * evaluator(state).
struct UtilityFunction {
  std::vector<ObjectiveTerm> terms;
  double value(const ProjectedState& state) const;
};

// The two traffic objectives: minimise average waiting of all vehicles and
// minimise total waiting of priority vehicles, i.e.
//   U = -( (X_wt + Y_wt) / (X + Y) + Y_wt ),  U = 0 on an empty state.
UtilityFunction build_traffic_utility();

double eval_average_waiting_all(const ProjectedState& state);
double eval_total_waiting_priority(const ProjectedState& state);

// Transitive closure of blocked-behind: the stopping vehicle plus every
// vehicle whose forward cell is occupied by a member of the closure.
std::set<int> affected_set(const WorldState& world, int stopping_vehicle);

// Utility of the one-step projection where `agent_id` obeys `norm_id`
// (stops), its affected set waits one more step, and everyone else goes.
// Never mutates the world. Throws std::logic_error if the norm is not
// applicable to the agent's current view.
double accumulated_utility(const WorldState& world,
                           const UtilityFunction& utility,
                           const NormSet& norm_set, int agent_id, int norm_id);

// Per-vehicle outcome of the unmatchable-norm resolution.
struct NormAssignment {
  std::map<int, int> norm_by_vehicle;  // vehicle id -> assigned norm id
  // Candidates dismissed by utility arbitration (vehicle id, norm id).
  std::vector<std::pair<int, int>> dismissed;
};

// Groups vehicles by contended target cell; within a group with two or
// more applicable candidates, the accumulated-utility maximum is assigned
// and the rest dismissed. Ties break by ascending (norm id, vehicle id).
NormAssignment resolve_unmatchable(const WorldState& world,
                                   const NormSet& norm_set,
                                   const UtilityFunction& utility);

}  // namespace normsim
