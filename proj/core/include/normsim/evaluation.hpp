#pragma once

#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "normsim/detection.hpp"
#include "normsim/norms.hpp"

namespace normsim {

struct EvaluationConfig {
  double w_vc = 1.0;    // importance of harmful violations
  double w_vnc = 1.0;   // importance of harmless violations
  double w_ac = 1.0;    // importance of unsuccessful applications
  double w_anc = 1.0;   // importance of successful applications
  double necessity_threshold = 0.3;
  double effectiveness_threshold = 0.3;
  int refine_interval = 50;  // T
  int window = 100;          // W, stats window in steps

  void validate() const;  // throws std::invalid_argument
};

// Windowed per-norm counters feeding the necessity / effectiveness scores.
struct NormStats {
  ApplicationCounts totals;  // over the last `window` steps
  std::deque<ApplicationCounts> history;
  int good_streak = 0;  // consecutive steps with both scores defined and >= thresholds
  int bad_streak = 0;   // consecutive steps with a defined score below threshold
};

// NNR: how often violating the norm proved harmful. Undefined (nullopt)
// when the norm was never violated inside the window.
std::optional<double> necessity(const NormStats& stats,
                                const EvaluationConfig& config);

// NER: how often applying the norm was successful. Undefined when the
// norm was never applied inside the window.
std::optional<double> effectiveness(const NormStats& stats,
                                    const EvaluationConfig& config);

class NormStatsTracker {
 public:
  // Records one step of counter increments for every active norm and
  // advances the threshold streaks.
  void record_step(const std::map<int, ApplicationCounts>& increments,
                   const NormSet& set, const EvaluationConfig& config);

  const NormStats* stats_for(int norm_id) const;
  std::optional<double> necessity_of(int norm_id,
                                     const EvaluationConfig& config) const;
  std::optional<double> effectiveness_of(int norm_id,
                                         const EvaluationConfig& config) const;

  void reset(int norm_id);  // fresh window and streaks (reactivated norms)

 private:
  std::map<int, NormStats> stats_;
};

struct RefinementReport {
  std::vector<int> generalised;   // parent norm ids created or reused
  std::vector<int> merged;        // children folded into those parents
  std::vector<int> specialised;   // norms replaced by their children
  std::vector<int> deactivated;   // leaf norms switched off
  std::vector<int> reactivated;   // children brought back by specialisation
};

// Threshold-driven refinement, run once per interval: sibling groups whose
// scores held above both thresholds for T steps are generalised; norms
// whose scores held below a threshold for T steps are specialised when
// they have children and deactivated otherwise. Undefined scores exempt.
RefinementReport refine(NormSet& set, NormGraph& graph,
                        NormStatsTracker& tracker,
                        const EvaluationConfig& config, int current_step);

}  // namespace normsim
