#pragma once

#include <span>
#include <vector>

#include "normsim/detection.hpp"
#include "normsim/norms.hpp"
#include "normsim/rng.hpp"

namespace normsim {

// Fairness-preserving strategy: one norm per responsible agent's context,
// unless an active norm already covers it. Returns ids of created norms.
std::vector<int> synthesize_uns(std::span<const Conflict> conflicts,
                                NormSet& norm_set, int current_step);

// Baseline: a single uniformly drawn responsible agent per conflict.
std::vector<int> synthesize_iron(std::span<const Conflict> conflicts,
                                 NormSet& norm_set, SplitMix64& rng,
                                 int current_step);

}  // namespace normsim
