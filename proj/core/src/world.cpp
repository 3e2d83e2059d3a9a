#include "normsim/world.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace normsim {

RoadMap RoadMap::standard(int grid_size) {
  if (grid_size < 5) throw std::invalid_argument("grid_size must be >= 5");
  RoadMap map;
  map.grid_size = grid_size;
  int a = (grid_size - 1) / 2;  // 9 for the default 19x19 grid
  int b = a + 1;
  int last = grid_size - 1;
  map.lanes = {
      {Heading::East, {a, 0}, {a, last}},   // horizontal road, eastbound
      {Heading::West, {b, last}, {b, 0}},   // horizontal road, westbound
      {Heading::South, {0, a}, {last, a}},  // vertical road, southbound
      {Heading::North, {last, b}, {0, b}},  // vertical road, northbound
  };
  map.junction_cells = {{a, a}, {a, b}, {b, a}, {b, b}};
  return map;
}

WorldState::WorldState(RoadMap roadmap)
    : roadmap_(std::move(roadmap)),
      occupancy_(static_cast<std::size_t>(roadmap_.grid_size) *
                     roadmap_.grid_size,
                 -1) {}

int WorldState::active_count() const {
  int n = 0;
  for (const auto& v : vehicles_)
    if (is_active(v)) ++n;
  return n;
}

const Vehicle* WorldState::find(int vehicle_id) const {
  for (const auto& v : vehicles_)
    if (v.id == vehicle_id) return &v;
  return nullptr;
}

Vehicle* WorldState::find_mut(int vehicle_id) {
  for (auto& v : vehicles_)
    if (v.id == vehicle_id) return &v;
  return nullptr;
}

std::optional<int> WorldState::occupant(Position p) const {
  if (!roadmap_.in_grid(p)) return std::nullopt;
  int id = occupancy_[static_cast<std::size_t>(p.row) * roadmap_.grid_size +
                      p.col];
  if (id >= 0) return id;
  if (auto it = wrecks_.find(p); it != wrecks_.end() && !it->second.empty())
    return it->second.front();
  return std::nullopt;
}

bool WorldState::cell_blocked(Position p) const {
  return occupant(p).has_value();
}

Vehicle& WorldState::place_vehicle(VehicleKind kind, Position pos,
                                   Heading heading, Position destination) {
  if (!roadmap_.in_grid(pos))
    throw std::invalid_argument("place_vehicle: position off grid");
  if (cell_blocked(pos))
    throw std::invalid_argument("place_vehicle: cell occupied");
  Vehicle v;
  v.id = next_vehicle_id_++;
  v.kind = kind;
  v.position = pos;
  v.heading = heading;
  v.destination = destination;
  v.spawn_step = time_step_;
  vehicles_.push_back(v);
  occupancy_[static_cast<std::size_t>(pos.row) * roadmap_.grid_size + pos.col] =
      v.id;
  return vehicles_.back();
}

std::vector<int> WorldState::spawn_vehicles(SplitMix64& rng,
                                            const SpawnSettings& cfg) {
  if (cfg.spawn_min > cfg.spawn_max)
    throw std::invalid_argument("spawn_min > spawn_max");
  std::vector<int> spawned;
  int count = rng.range(cfg.spawn_min, cfg.spawn_max);
  double p_priority =
      static_cast<double>(cfg.priority_num) /
      static_cast<double>(cfg.priority_num + cfg.priority_den);
  for (int i = 0; i < count; ++i) {
    const Lane& lane =
        roadmap_.lanes[rng.below(static_cast<std::uint32_t>(
            roadmap_.lanes.size()))];
    VehicleKind kind = rng.bernoulli(p_priority) ? VehicleKind::Priority
                                                 : VehicleKind::Ordinary;
    if (cell_blocked(lane.entry)) continue;  // entry busy, vehicle skipped
    Vehicle& v = place_vehicle(kind, lane.entry, lane.heading, lane.exit);
    spawned.push_back(v.id);
  }
  return spawned;
}

LocalView WorldState::local_view(int vehicle_id) const {
  const Vehicle* v = find(vehicle_id);
  if (!v || v->state == VehicleState::Exited)
    throw std::out_of_range("local_view: unknown vehicle " +
                            std::to_string(vehicle_id));
  auto describe_cell = [&](Position p) {
    std::optional<Heading> heading;
    if (auto id = occupant(p); id && *id != vehicle_id)
      heading = find(*id)->heading;
    return describe(v->heading, heading);
  };
  Position front = step_from(v->position, v->heading);
  return {describe_cell(step_from(front, left_of(v->heading))),
          describe_cell(front),
          describe_cell(step_from(front, right_of(v->heading)))};
}

std::map<int, Position> WorldState::intended_moves() {
  std::map<int, Position> targets;
  for (auto& v : vehicles_) {
    if (!is_active(v)) continue;
    if (v.state == VehicleState::Moving) {
      Position t = forward_target(v);
      if (!roadmap_.in_grid(t)) {
        // boundary exit: the vehicle leaves the grid this step
        occupancy_[static_cast<std::size_t>(v.position.row) *
                       roadmap_.grid_size +
                   v.position.col] = -1;
        v.state = VehicleState::Exited;
        exited_count_ += 1;
        exited_waiting_total_ += v.waiting_steps;
        if (v.kind == VehicleKind::Priority) {
          exited_priority_count_ += 1;
          exited_priority_waiting_ += v.waiting_steps;
        }
        continue;
      }
      targets[v.id] = t;
    } else {
      targets[v.id] = v.position;
    }
  }
  return targets;
}

void WorldState::retire_old_wrecks() {
  // Collided vehicles block their cell for exactly one subsequent step.
  std::erase_if(vehicles_, [&](const Vehicle& v) {
    return v.state == VehicleState::Collided && v.collided_step < time_step_;
  });
  for (auto it = wrecks_.begin(); it != wrecks_.end();) {
    auto& ids = it->second;
    std::erase_if(ids, [&](int id) { return find(id) == nullptr; });
    it = ids.empty() ? wrecks_.erase(it) : std::next(it);
  }
}

ApplyResult WorldState::apply_moves(const std::map<int, Action>& decisions) {
  ApplyResult result;
  retire_old_wrecks();

  struct Mover {
    Vehicle* v;
    Position target;
  };
  std::vector<Mover> movers;
  std::vector<Vehicle*> stoppers;
  for (auto& v : vehicles_) {
    if (!is_active(v)) continue;
    auto it = decisions.find(v.id);
    if (it == decisions.end())
      throw std::invalid_argument("apply_moves: missing decision for vehicle " +
                                  std::to_string(v.id));
    if (it->second == Action::Go)
      movers.push_back({&v, forward_target(v)});
    else
      stoppers.push_back(&v);
  }
  std::sort(movers.begin(), movers.end(),
            [](const Mover& a, const Mover& b) { return a.v->id < b.v->id; });

  int new_step = time_step_ + 1;

  // Off-grid targets leave the grid (normally the exit-at-destination rule
  // fires first, but a hand-built world can hit this).
  std::erase_if(movers, [&](const Mover& m) {
    if (roadmap_.in_grid(m.target)) return false;
    Vehicle* v = m.v;
    occupancy_[static_cast<std::size_t>(v->position.row) * roadmap_.grid_size +
               v->position.col] = -1;
    v->state = VehicleState::Exited;
    exited_count_ += 1;
    exited_waiting_total_ += v->waiting_steps;
    if (v->kind == VehicleKind::Priority) {
      exited_priority_count_ += 1;
      exited_priority_waiting_ += v->waiting_steps;
    }
    result.exited_ids.push_back(v->id);
    result.moved += 1;
    return true;
  });

  // Collision rule: two or more Go vehicles claiming one cell all collide
  // there, independent of any blocking outcome.
  std::map<Position, std::vector<Mover*>> claims;
  for (auto& m : movers) claims[m.target].push_back(&m);
  std::set<int> collided_ids;
  for (auto& [cell, claimants] : claims) {
    if (claimants.size() < 2) continue;
    CollisionEvent event{cell, {}};
    for (Mover* m : claimants) {
      Vehicle* v = m->v;
      occupancy_[static_cast<std::size_t>(v->position.row) *
                     roadmap_.grid_size +
                 v->position.col] = -1;
      v->position = cell;
      v->state = VehicleState::Collided;
      v->collided_step = new_step;
      wrecks_[cell].push_back(v->id);
      event.vehicle_ids.push_back(v->id);
      collided_ids.insert(v->id);
    }
    result.collisions.push_back(event);
  }
  std::erase_if(movers,
                [&](const Mover& m) { return collided_ids.count(m.v->id); });

  // Blocking fixpoint: a mover whose target holds a vehicle that will not
  // move this step is itself demoted to waiting. Cyclic mover chains all
  // advance (cell-granular simultaneous movement).
  std::map<Position, int> moving_from;  // origin cell -> mover vehicle id
  for (auto& m : movers) moving_from[m.v->position] = m.v->id;
  std::set<int> demoted;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& m : movers) {
      if (demoted.count(m.v->id)) continue;
      bool blocked = false;
      if (auto occ = occupant(m.target)) {
        auto it = moving_from.find(m.target);
        bool occupant_moves = it != moving_from.end() && it->second == *occ &&
                              !demoted.count(*occ);
        blocked = !occupant_moves;
      }
      if (blocked) {
        demoted.insert(m.v->id);
        changed = true;
      }
    }
  }

  // Execute. Demoted movers and Stop decisions wait in place.
  for (auto& m : movers) {
    if (demoted.count(m.v->id)) continue;
    Vehicle* v = m.v;
    occupancy_[static_cast<std::size_t>(v->position.row) * roadmap_.grid_size +
               v->position.col] = -1;
    v->position = m.target;
    if (v->position == v->destination) {
      v->state = VehicleState::Exited;
      exited_count_ += 1;
      exited_waiting_total_ += v->waiting_steps;
      if (v->kind == VehicleKind::Priority) {
        exited_priority_count_ += 1;
        exited_priority_waiting_ += v->waiting_steps;
      }
      result.exited_ids.push_back(v->id);
    } else {
      occupancy_[static_cast<std::size_t>(v->position.row) *
                     roadmap_.grid_size +
                 v->position.col] = v->id;
      v->state = VehicleState::Moving;
    }
    result.moved += 1;
  }
  for (auto& m : movers) {
    if (!demoted.count(m.v->id)) continue;
    m.v->state = VehicleState::Stopped;
    m.v->waiting_steps += 1;
    result.waited += 1;
  }
  for (Vehicle* v : stoppers) {
    v->state = VehicleState::Stopped;
    v->waiting_steps += 1;
    result.waited += 1;
  }

  std::erase_if(vehicles_,
                [](const Vehicle& v) { return v.state == VehicleState::Exited; });
  time_step_ = new_step;
  rebuild_occupancy();
  return result;
}

void WorldState::rebuild_occupancy() {
  std::fill(occupancy_.begin(), occupancy_.end(), -1);
  for (const auto& v : vehicles_) {
    if (!is_active(v)) continue;
    std::size_t idx = static_cast<std::size_t>(v.position.row) *
                          roadmap_.grid_size +
                      v.position.col;
    if (occupancy_[idx] != -1)
      throw std::logic_error("occupancy invariant violated");
    occupancy_[idx] = v.id;
  }
}

std::uint64_t WorldState::state_hash() const {
  auto mix = [](std::uint64_t h, std::uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  };
  std::uint64_t h = static_cast<std::uint64_t>(time_step_);
  std::vector<const Vehicle*> sorted;
  for (const auto& v : vehicles_) sorted.push_back(&v);
  std::sort(sorted.begin(), sorted.end(),
            [](const Vehicle* a, const Vehicle* b) { return a->id < b->id; });
  for (const Vehicle* v : sorted) {
    h = mix(h, static_cast<std::uint64_t>(v->id));
    h = mix(h, static_cast<std::uint64_t>(v->kind));
    h = mix(h, static_cast<std::uint64_t>(v->position.row * 1024 +
                                          v->position.col));
    h = mix(h, static_cast<std::uint64_t>(v->heading));
    h = mix(h, static_cast<std::uint64_t>(v->waiting_steps));
    h = mix(h, static_cast<std::uint64_t>(v->state));
  }
  h = mix(h, static_cast<std::uint64_t>(exited_count_));
  h = mix(h, static_cast<std::uint64_t>(exited_waiting_total_));
  return h;
}

}  // namespace normsim
