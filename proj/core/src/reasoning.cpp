#include "normsim/reasoning.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace normsim {

double UtilityFunction::value(const ProjectedState& state) const {
  double total = 0.0;
  for (const auto& term : terms) {
    double sign = term.sense == Sense::Maximise ? 1.0 : -1.0;
    total += sign * term.weight * term.evaluator(state);
  }
  return total;
}

double eval_average_waiting_all(const ProjectedState& state) {
  if (state.vehicles.empty()) return 0.0;
  double total = 0.0;
  for (const auto& v : state.vehicles) total += v.projected_waiting;
  return total / static_cast<double>(state.vehicles.size());
}

double eval_total_waiting_priority(const ProjectedState& state) {
  double total = 0.0;
  for (const auto& v : state.vehicles)
    if (v.kind == VehicleKind::Priority) total += v.projected_waiting;
  return total;
}

UtilityFunction build_traffic_utility() {
  UtilityFunction u;
  u.terms.push_back({"average-waiting-all", Sense::Minimise, 1.0,
                     &eval_average_waiting_all});
  u.terms.push_back({"total-waiting-priority", Sense::Minimise, 1.0,
                     &eval_total_waiting_priority});
  return u;
}

std::set<int> affected_set(const WorldState& world, int stopping_vehicle) {
  const Vehicle* head = world.find(stopping_vehicle);
  if (!head || !world.is_active(*head))
    throw std::out_of_range("affected_set: vehicle not active");
  std::set<int> members{stopping_vehicle};
  std::set<Position> member_cells{head->position};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& v : world.vehicles()) {
      if (!world.is_active(v) || members.count(v.id)) continue;
      if (member_cells.count(world.forward_target(v))) {
        members.insert(v.id);
        member_cells.insert(v.position);
        grew = true;
      }
    }
  }
  return members;
}

double accumulated_utility(const WorldState& world,
                           const UtilityFunction& utility,
                           const NormSet& norm_set, int agent_id, int norm_id) {
  const Norm* norm = norm_set.find(norm_id);
  if (!norm)
    throw std::out_of_range("accumulated_utility: unknown norm " +
                            std::to_string(norm_id));
  if (!norm->precondition.matches(world.local_view(agent_id)))
    throw std::logic_error("accumulated_utility: norm not applicable");

  std::set<int> blocked = affected_set(world, agent_id);
  ProjectedState projection;
  for (const auto& v : world.vehicles()) {
    if (!world.is_active(v)) continue;
    double waiting = v.waiting_steps + (blocked.count(v.id) ? 1.0 : 0.0);
    projection.vehicles.push_back({v.kind, waiting});
  }
  return utility.value(projection);
}

NormAssignment resolve_unmatchable(const WorldState& world,
                                   const NormSet& norm_set,
                                   const UtilityFunction& utility) {
  struct Candidate {
    int vehicle_id;
    int norm_id;
  };
  // Contention groups: vehicles whose heading-forward cells coincide are
  // exactly the pre-collision geometry the unmatchable norms describe.
  std::map<Position, std::vector<const Vehicle*>> groups;
  for (const auto& v : world.vehicles()) {
    if (!world.is_active(v)) continue;
    groups[world.forward_target(v)].push_back(&v);
  }

  NormAssignment assignment;
  for (auto& [cell, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const Vehicle* a, const Vehicle* b) { return a->id < b->id; });
    std::vector<Candidate> candidates;
    for (const Vehicle* v : members)
      for (const Norm* n : norm_set.applicable(world.local_view(v->id)))
        candidates.push_back({v->id, n->id});
    if (candidates.empty()) continue;
    if (candidates.size() == 1) {
      assignment.norm_by_vehicle[candidates[0].vehicle_id] =
          candidates[0].norm_id;
      continue;
    }
    // Tie-break by ascending (norm id, vehicle id): evaluate in that order
    // and replace only on strictly larger utility.
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                return std::pair(a.norm_id, a.vehicle_id) <
                       std::pair(b.norm_id, b.vehicle_id);
              });
    const Candidate* best = nullptr;
    double best_utility = 0.0;
    for (const Candidate& c : candidates) {
      double u =
          accumulated_utility(world, utility, norm_set, c.vehicle_id, c.norm_id);
      if (!best || u > best_utility) {
        best = &c;
        best_utility = u;
      }
    }
    assignment.norm_by_vehicle[best->vehicle_id] = best->norm_id;
    for (const Candidate& c : candidates)
      if (c.vehicle_id != best->vehicle_id || c.norm_id != best->norm_id)
        assignment.dismissed.push_back({c.vehicle_id, c.norm_id});
  }
  return assignment;
}

}  // namespace normsim
