#include "normsim/synthesis.hpp"

namespace normsim {

std::vector<int> synthesize_uns(std::span<const Conflict> conflicts,
                                NormSet& norm_set, int current_step) {
  std::vector<int> created;
  for (const Conflict& c : conflicts) {
    for (const auto& responsible : c.responsible) {
      if (norm_set.has_applicable(responsible.context)) continue;
      Norm& n =
          norm_set.add(Precondition::ground(responsible.context), current_step);
      created.push_back(n.id);
    }
  }
  return created;
}

std::vector<int> synthesize_iron(std::span<const Conflict> conflicts,
                                 NormSet& norm_set, SplitMix64& rng,
                                 int current_step) {
  std::vector<int> created;
  for (const Conflict& c : conflicts) {
    const auto& chosen = c.responsible[rng.below(
        static_cast<std::uint32_t>(c.responsible.size()))];
    if (norm_set.has_applicable(chosen.context)) continue;
    Norm& n = norm_set.add(Precondition::ground(chosen.context), current_step);
    created.push_back(n.id);
  }
  return created;
}

}  // namespace normsim
