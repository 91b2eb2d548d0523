#include "fansmb/scorer.hpp"

#include "fansmb/error.hpp"

namespace fansmb {

namespace {

std::string context(int target, int candidate) {
  return "scoring target " + std::to_string(target) + " with candidate " + std::to_string(candidate) + ": ";
}

}  // namespace

std::vector<double> Scorer::candidate_entropies(int target, const VarSet& base,
                                                std::span<const int> candidates) const {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (int c : candidates) {
    VarSet s = base;
    s.insert(c);
    try {
      out.push_back(entropy(target, s));
    } catch (const UsageError& e) {
      throw UsageError(context(target, c) + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError(context(target, c) + e.what());
    }
  }
  return out;
}

}  // namespace fansmb
