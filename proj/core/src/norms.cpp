#include "normsim/norms.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace normsim {

Norm& NormSet::add(const Precondition& precondition, int created_step) {
  for (auto& n : norms_)
    if (n.active && n.precondition == precondition) return n;
  Norm n;
  n.id = next_id_++;
  n.precondition = precondition;
  n.active = true;
  n.created_step = created_step;
  norms_.push_back(n);
  return norms_.back();
}

const Norm* NormSet::find(int id) const {
  for (const auto& n : norms_)
    if (n.id == id) return &n;
  return nullptr;
}

Norm* NormSet::find_mut(int id) {
  for (auto& n : norms_)
    if (n.id == id) return &n;
  return nullptr;
}

const Norm* NormSet::find_active(const Precondition& precondition) const {
  for (const auto& n : norms_)
    if (n.active && n.precondition == precondition) return &n;
  return nullptr;
}

std::vector<const Norm*> NormSet::applicable(const LocalView& view) const {
  std::vector<const Norm*> out;
  for (const auto& n : norms_)
    if (n.active && n.precondition.matches(view)) out.push_back(&n);
  std::sort(out.begin(), out.end(),
            [](const Norm* a, const Norm* b) { return a->id < b->id; });
  return out;
}

bool NormSet::has_applicable(const LocalView& view) const {
  for (const auto& n : norms_)
    if (n.active && n.precondition.matches(view)) return true;
  return false;
}

int NormSet::active_count() const {
  int c = 0;
  for (const auto& n : norms_)
    if (n.active) ++c;
  return c;
}

void NormGraph::add_edge(int parent, int child) {
  auto& kids = children_[parent];
  if (std::find(kids.begin(), kids.end(), child) == kids.end())
    kids.push_back(child);
  parent_[child] = parent;
}

const std::vector<int>& NormGraph::children(int parent) const {
  static const std::vector<int> kEmpty;
  auto it = children_.find(parent);
  return it == children_.end() ? kEmpty : it->second;
}

std::optional<int> NormGraph::parent_of(int child) const {
  auto it = parent_.find(child);
  if (it == parent_.end()) return std::nullopt;
  return it->second;
}

Norm& generalize(NormGraph& graph, NormSet& set, std::span<const int> norm_ids,
                 int created_step) {
  if (norm_ids.size() < 2)
    throw std::invalid_argument("generalize: need at least two norms");
  std::vector<const Norm*> norms;
  for (int id : norm_ids) {
    const Norm* n = set.find(id);
    if (!n) throw std::out_of_range("generalize: unknown norm id");
    if (!n->active) throw std::invalid_argument("generalize: norm inactive");
    norms.push_back(n);
  }
  // The norms must agree on all slots but exactly one.
  int differing_slot = -1;
  for (int s = 0; s < 3; ++s) {
    bool all_equal = std::all_of(
        norms.begin(), norms.end(), [&](const Norm* n) {
          return n->precondition.slot(s) == norms[0]->precondition.slot(s);
        });
    if (all_equal) continue;
    if (differing_slot != -1)
      throw std::invalid_argument("generalize: norms differ in several slots");
    differing_slot = s;
  }
  if (differing_slot == -1)
    throw std::invalid_argument("generalize: norms have identical preconditions");

  Precondition parent_pre = norms[0]->precondition;
  parent_pre.slot(differing_slot) = SlotPattern{};  // wildcard

  // Reuse a norm with this precondition if one exists, reactivating it.
  Norm* parent = nullptr;
  for (auto& n : set) {
    if (n.precondition == parent_pre) {
      parent = set.find_mut(n.id);
      break;
    }
  }
  if (!parent) parent = &set.add(parent_pre, created_step);
  parent->active = true;

  for (int id : norm_ids) {
    set.find_mut(id)->active = false;
    graph.add_edge(parent->id, id);
  }
  return *parent;
}

std::vector<int> specialize(NormGraph& graph, NormSet& set, int norm_id) {
  Norm* n = set.find_mut(norm_id);
  if (!n) throw std::out_of_range("specialize: unknown norm id");
  if (!n->active) throw std::invalid_argument("specialize: norm inactive");
  n->active = false;
  std::vector<int> reactivated;
  for (int child : graph.children(norm_id)) {
    Norm* c = set.find_mut(child);
    if (c && !c->active) {
      c->active = true;
      reactivated.push_back(child);
    }
  }
  std::sort(reactivated.begin(), reactivated.end());
  return reactivated;
}

char slot_symbol(const SlotPattern& p) {
  if (p.is_wildcard()) return '*';
  switch (*p.value) {
    case CellDescriptor::Empty: return '-';
    case CellDescriptor::SameHeading: return '^';
    case CellDescriptor::OppositeHeading: return 'v';
    case CellDescriptor::HeadingFromLeft: return '<';
    case CellDescriptor::HeadingFromRight: return '>';
  }
  return '?';
}

std::string to_text(const Precondition& p) {
  std::string s = "if(left(";
  s += slot_symbol(p.left);
  s += "),front(";
  s += slot_symbol(p.front);
  s += "),right(";
  s += slot_symbol(p.right);
  s += ")) -> proh(Go)";
  return s;
}

std::string to_text(const Norm& n) { return to_text(n.precondition); }

}  // namespace normsim
