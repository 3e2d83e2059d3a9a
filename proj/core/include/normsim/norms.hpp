#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "normsim/geometry.hpp"

namespace normsim {

// One precondition slot: a concrete descriptor or a wildcard.
struct SlotPattern {
  std::optional<CellDescriptor> value;  // nullopt = wildcard

  bool is_wildcard() const { return !value.has_value(); }
  bool matches(CellDescriptor d) const { return !value || *value == d; }
  auto operator<=>(const SlotPattern&) const = default;
};

struct Precondition {
  SlotPattern left, front, right;

  bool matches(const LocalView& view) const {
    return left.matches(view.left) && front.matches(view.front) &&
           right.matches(view.right);
  }
  int wildcard_count() const {
    return int(left.is_wildcard()) + int(front.is_wildcard()) +
           int(right.is_wildcard());
  }
  bool is_ground() const { return wildcard_count() == 0; }

  static Precondition ground(const LocalView& view) {
    return {{view.left}, {view.front}, {view.right}};
  }

  const SlotPattern& slot(int i) const {
    return i == 0 ? left : (i == 1 ? front : right);
  }
  SlotPattern& slot(int i) { return i == 0 ? left : (i == 1 ? front : right); }

  auto operator<=>(const Precondition&) const = default;
};

// Always Prohibition(Go); the deontic pair is implicit.
struct Norm {
  int id = -1;
  Precondition precondition;
  bool active = true;
  int created_step = 0;
};

class NormSet {
 public:
  // Idempotent on active duplicates: returns the existing active norm if
  // one carries an identical precondition, otherwise creates a fresh one.
  Norm& add(const Precondition& precondition, int created_step);

  const Norm* find(int id) const;
  Norm* find_mut(int id);
  const Norm* find_active(const Precondition& precondition) const;

  // Active norms matching the view, ascending id.
  std::vector<const Norm*> applicable(const LocalView& view) const;
  bool has_applicable(const LocalView& view) const;

  std::size_t size() const { return norms_.size(); }
  int active_count() const;

  auto begin() const { return norms_.begin(); }
  auto end() const { return norms_.end(); }

 private:
  std::vector<Norm> norms_;
  int next_id_ = 0;
};

// Parent -> children generalisation edges; acyclic by construction.
class NormGraph {
 public:
  void add_edge(int parent, int child);
  const std::vector<int>& children(int parent) const;
  std::optional<int> parent_of(int child) const;

 private:
  std::map<int, std::vector<int>> children_;
  std::map<int, int> parent_;
};

// Merges norms differing in exactly one slot into a wildcard parent;
// children are deactivated, the parent activated. Throws
// std::invalid_argument if the norms do not differ in exactly one slot.
Norm& generalize(NormGraph& graph, NormSet& set, std::span<const int> norm_ids,
                 int created_step);

// Deactivates the norm and reactivates its children (empty result means
// pure deactivation). Throws std::out_of_range on an unknown id.
std::vector<int> specialize(NormGraph& graph, NormSet& set, int norm_id);

// Textual form: if(left(X),front(Y),right(Z)) -> proh(Go)
// with X,Y,Z in {-, ^, v, <, >, *}.
char slot_symbol(const SlotPattern& p);
std::string to_text(const Precondition& p);
std::string to_text(const Norm& n);

}  // namespace normsim
