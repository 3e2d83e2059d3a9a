#include "normsim/detection.hpp"

#include <algorithm>
#include <set>

namespace normsim {

std::vector<Conflict> detect_conflicts(const ViewTransition& transition) {
  std::map<Position, std::vector<const AgentSnapshot*>> arrivals;
  for (const auto& agent : transition.agents)
    if (agent.decision == Action::Go)
      arrivals[agent.ahead_cell].push_back(&agent);

  std::vector<Conflict> conflicts;
  for (const auto& [cell, agents] : arrivals) {
    if (agents.size() < 2) continue;
    Conflict c;
    c.time_step = transition.before_step + 1;
    c.cell = cell;
    for (const AgentSnapshot* a : agents)
      c.responsible.push_back({a->vehicle_id, a->view});
    std::sort(c.responsible.begin(), c.responsible.end(),
              [](const auto& a, const auto& b) {
                return a.vehicle_id < b.vehicle_id;
              });
    conflicts.push_back(std::move(c));
  }
  return conflicts;  // ordered by cell via the map
}

std::map<int, ApplicationCounts> classify_applications(
    const ViewTransition& transition, const std::vector<Conflict>& conflicts) {
  std::set<Position> conflict_cells;
  std::set<int> conflicted_vehicles;
  for (const auto& c : conflicts) {
    conflict_cells.insert(c.cell);
    for (const auto& r : c.responsible) conflicted_vehicles.insert(r.vehicle_id);
  }

  std::map<int, ApplicationCounts> counts;
  for (const auto& agent : transition.agents) {
    for (const auto& [norm_id, violated] : agent.norm_events) {
      ApplicationCounts& c = counts[norm_id];
      if (violated) {
        // The agent took Go despite the norm.
        if (conflicted_vehicles.count(agent.vehicle_id))
          c.violated_conflict += 1;
        else
          c.violated_no_conflict += 1;
      } else {
        // The agent obeyed; attribution is local to the cell it gave up.
        if (conflict_cells.count(agent.ahead_cell))
          c.applied_conflict += 1;
        else
          c.applied_no_conflict += 1;
      }
    }
  }
  return counts;
}

}  // namespace normsim
