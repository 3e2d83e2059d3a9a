#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "normsim/geometry.hpp"
#include "normsim/rng.hpp"

namespace normsim {

enum class VehicleKind : std::uint8_t { Ordinary, Priority };
enum class VehicleState : std::uint8_t { Moving, Stopped, Collided, Exited };
enum class Action : std::uint8_t { Go, Stop };

struct Vehicle {
  int id = -1;
  VehicleKind kind = VehicleKind::Ordinary;
  Position position;
  Heading heading = Heading::North;
  Position destination;
  int spawn_step = 0;
  int waiting_steps = 0;
  VehicleState state = VehicleState::Moving;
  int collided_step = -1;
};

struct Lane {
  Heading heading;
  Position entry;
  Position exit;
};

struct RoadMap {
  int grid_size = 19;
  std::vector<Lane> lanes;
  std::vector<Position> junction_cells;

  // Two orthogonal roads, two lanes each, crossing at the grid centre.
  static RoadMap standard(int grid_size = 19);

  bool in_grid(Position p) const {
    return p.row >= 0 && p.row < grid_size && p.col >= 0 && p.col < grid_size;
  }
};

struct SpawnSettings {
  int spawn_min = 2;
  int spawn_max = 8;
  int priority_num = 12;   // priority : ordinary ratio, 12:100
  int priority_den = 100;
};

struct CollisionEvent {
  Position cell;
  std::vector<int> vehicle_ids;
};

struct ApplyResult {
  int moved = 0;
  int waited = 0;  // Stop decisions plus blocked Go attempts
  std::vector<CollisionEvent> collisions;
  std::vector<int> exited_ids;
};

class WorldState {
 public:
  explicit WorldState(RoadMap roadmap);

  int time_step() const { return time_step_; }
  const RoadMap& roadmap() const { return roadmap_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }

  // Active = participates in movement (Moving or Stopped).
  bool is_active(const Vehicle& v) const {
    return v.state == VehicleState::Moving || v.state == VehicleState::Stopped;
  }
  int active_count() const;
  const Vehicle* find(int vehicle_id) const;
  Vehicle* find_mut(int vehicle_id);

  // Occupant of a cell, if any (a collided wreck counts as an occupant).
  std::optional<int> occupant(Position p) const;
  bool cell_blocked(Position p) const;

  // Cumulative waiting tallies over exited vehicles (frozen at exit).
  int exited_count() const { return exited_count_; }
  long long exited_waiting_total() const { return exited_waiting_total_; }
  int exited_priority_count() const { return exited_priority_count_; }
  long long exited_priority_waiting() const { return exited_priority_waiting_; }

  // Places a vehicle directly (test and spawn path). Throws if occupied.
  Vehicle& place_vehicle(VehicleKind kind, Position pos, Heading heading,
                         Position destination);

  std::vector<int> spawn_vehicles(SplitMix64& rng, const SpawnSettings& cfg);

  LocalView local_view(int vehicle_id) const;

  // Per-state intent: Moving -> one cell ahead, Stopped/Collided -> in place.
  // Vehicles whose forward cell is off-grid are marked Exited by this call.
  std::map<int, Position> intended_moves();

  // Heading-forward cell regardless of stopped state; what the vehicle
  // would enter if told Go. Used for contention grouping and chains.
  Position forward_target(const Vehicle& v) const {
    return step_from(v.position, v.heading);
  }

  ApplyResult apply_moves(const std::map<int, Action>& decisions);

  // Order-insensitive digest of the full mutable state.
  std::uint64_t state_hash() const;

 private:
  void rebuild_occupancy();
  void retire_old_wrecks();

  RoadMap roadmap_;
  int time_step_ = 0;
  int next_vehicle_id_ = 0;
  std::vector<Vehicle> vehicles_;
  std::vector<int> occupancy_;  // cell -> vehicle id of non-collided occupant
  std::map<Position, std::vector<int>> wrecks_;  // collided, blocking 1 step
  int exited_count_ = 0;
  long long exited_waiting_total_ = 0;
  int exited_priority_count_ = 0;
  long long exited_priority_waiting_ = 0;
};

}  // namespace normsim
