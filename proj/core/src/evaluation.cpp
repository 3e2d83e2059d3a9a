#include "normsim/evaluation.hpp"

#include <algorithm>
#include <stdexcept>

namespace normsim {

void EvaluationConfig::validate() const {
  if (w_vc <= 0 || w_vnc <= 0 || w_ac <= 0 || w_anc <= 0)
    throw std::invalid_argument("evaluation weights must be positive");
  if (necessity_threshold < 0 || necessity_threshold > 1 ||
      effectiveness_threshold < 0 || effectiveness_threshold > 1)
    throw std::invalid_argument("thresholds must lie in [0,1]");
  if (refine_interval < 1) throw std::invalid_argument("T must be >= 1");
  if (window < refine_interval)
    throw std::invalid_argument("window W must be >= T");
}

std::optional<double> necessity(const NormStats& stats,
                                const EvaluationConfig& config) {
  double num = stats.totals.violated_conflict * config.w_vc;
  double den = num + stats.totals.violated_no_conflict * config.w_vnc;
  if (den == 0.0) return std::nullopt;
  return num / den;
}

std::optional<double> effectiveness(const NormStats& stats,
                                    const EvaluationConfig& config) {
  double num = stats.totals.applied_no_conflict * config.w_anc;
  double den = stats.totals.applied_conflict * config.w_ac + num;
  if (den == 0.0) return std::nullopt;
  return num / den;
}

void NormStatsTracker::record_step(
    const std::map<int, ApplicationCounts>& increments, const NormSet& set,
    const EvaluationConfig& config) {
  for (const auto& norm : set) {
    if (!norm.active) continue;
    NormStats& s = stats_[norm.id];
    ApplicationCounts inc;
    if (auto it = increments.find(norm.id); it != increments.end())
      inc = it->second;
    s.history.push_back(inc);
    s.totals.applied_conflict += inc.applied_conflict;
    s.totals.applied_no_conflict += inc.applied_no_conflict;
    s.totals.violated_conflict += inc.violated_conflict;
    s.totals.violated_no_conflict += inc.violated_no_conflict;
    while (static_cast<int>(s.history.size()) > config.window) {
      const ApplicationCounts& old = s.history.front();
      s.totals.applied_conflict -= old.applied_conflict;
      s.totals.applied_no_conflict -= old.applied_no_conflict;
      s.totals.violated_conflict -= old.violated_conflict;
      s.totals.violated_no_conflict -= old.violated_no_conflict;
      s.history.pop_front();
    }

    auto nnr = necessity(s, config);
    auto ner = effectiveness(s, config);
    bool both_good = nnr.has_value() && ner.has_value() &&
                     *nnr >= config.necessity_threshold &&
                     *ner >= config.effectiveness_threshold;
    bool any_bad = (nnr.has_value() && *nnr < config.necessity_threshold) ||
                   (ner.has_value() && *ner < config.effectiveness_threshold);
    s.good_streak = both_good ? s.good_streak + 1 : 0;
    s.bad_streak = any_bad ? s.bad_streak + 1 : 0;
  }
}

const NormStats* NormStatsTracker::stats_for(int norm_id) const {
  auto it = stats_.find(norm_id);
  return it == stats_.end() ? nullptr : &it->second;
}

std::optional<double> NormStatsTracker::necessity_of(
    int norm_id, const EvaluationConfig& config) const {
  const NormStats* s = stats_for(norm_id);
  if (!s) return std::nullopt;
  return necessity(*s, config);
}

std::optional<double> NormStatsTracker::effectiveness_of(
    int norm_id, const EvaluationConfig& config) const {
  const NormStats* s = stats_for(norm_id);
  if (!s) return std::nullopt;
  return effectiveness(*s, config);
}

void NormStatsTracker::reset(int norm_id) { stats_.erase(norm_id); }

RefinementReport refine(NormSet& set, NormGraph& graph,
                        NormStatsTracker& tracker,
                        const EvaluationConfig& config, int current_step) {
  RefinementReport report;
  const int t = config.refine_interval;

  // (a) Generalise sibling groups that held above both thresholds for T
  // steps. Siblings agree on two slots and differ in the third.
  // Copies, not pointers: generalize() may grow the set's storage.
  std::vector<std::pair<int, Precondition>> eligible;
  for (const auto& n : set) {
    if (!n.active) continue;
    const NormStats* s = tracker.stats_for(n.id);
    if (s && s->good_streak >= t) eligible.push_back({n.id, n.precondition});
  }
  std::sort(eligible.begin(), eligible.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::set<int> consumed;
  for (int slot = 0; slot < 3; ++slot) {
    std::map<std::pair<SlotPattern, SlotPattern>, std::vector<int>> buckets;
    for (const auto& [id, pre] : eligible) {
      if (consumed.count(id)) continue;
      // A wildcard in the candidate slot means this norm already sits one
      // level above the bucket; merging it with its own children would be
      // degenerate.
      if (pre.slot(slot).is_wildcard()) continue;
      int o1 = slot == 0 ? 1 : 0;
      int o2 = slot == 2 ? 1 : 2;
      buckets[{pre.slot(o1), pre.slot(o2)}].push_back(id);
    }
    for (auto& [key, ids] : buckets) {
      if (ids.size() < 2) continue;
      Norm& parent = generalize(graph, set, ids, current_step);
      tracker.reset(parent.id);
      report.generalised.push_back(parent.id);
      for (int id : ids) {
        consumed.insert(id);
        report.merged.push_back(id);
      }
    }
  }

  // (b) Specialise or deactivate norms that held below a threshold for T
  // steps. Norms generalised above are already inactive and skipped.
  std::vector<int> falling;
  for (const auto& n : set) {
    if (!n.active) continue;
    const NormStats* s = tracker.stats_for(n.id);
    if (s && s->bad_streak >= t) falling.push_back(n.id);
  }
  for (int id : falling) {
    std::vector<int> children = specialize(graph, set, id);
    if (children.empty()) {
      report.deactivated.push_back(id);
    } else {
      report.specialised.push_back(id);
      for (int child : children) {
        tracker.reset(child);
        report.reactivated.push_back(child);
      }
    }
  }
  return report;
}

}  // namespace normsim
