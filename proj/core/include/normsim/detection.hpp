#pragma once

#include <map>
#include <utility>
#include <vector>

#include "normsim/norms.hpp"
#include "normsim/world.hpp"

namespace normsim {

// Per-vehicle record of what happened between t-1 and t: the context the
// vehicle saw before deciding, the decision it took, and which norms it
// obeyed or violated.
struct AgentSnapshot {
  int vehicle_id = -1;
  LocalView view;            // context at t-1
  Position position;         // at t-1
  Position ahead_cell;       // cell one step ahead (target when Go)
  Action decision = Action::Go;
  // Norms this agent was bound by: (norm id, violated?). Dismissed norms
  // are not listed; their counters must not move.
  std::vector<std::pair<int, bool>> norm_events;
};

struct ViewTransition {
  int before_step = 0;
  std::vector<AgentSnapshot> agents;
};

struct Conflict {
  struct Responsible {
    int vehicle_id;
    LocalView context;  // at t-1
  };
  int time_step = 0;  // step of occurrence (= before_step + 1)
  Position cell;
  std::vector<Responsible> responsible;
};

// One Conflict per cell into which two or more Go decisions landed.
std::vector<Conflict> detect_conflicts(const ViewTransition& transition);

struct ApplicationCounts {
  int applied_conflict = 0;
  int applied_no_conflict = 0;
  int violated_conflict = 0;
  int violated_no_conflict = 0;
};

// Classifies each recorded (vehicle, norm) event into exactly one of the
// four sets of the evaluation bookkeeping.
std::map<int, ApplicationCounts> classify_applications(
    const ViewTransition& transition, const std::vector<Conflict>& conflicts);

}  // namespace normsim
