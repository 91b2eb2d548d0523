#include "fansmb/greedy_mb.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#include <omp.h>

#include "fansmb/error.hpp"

namespace fansmb {

std::string to_string(SymmetryRule rule) {
  switch (rule) {
    case SymmetryRule::Union: return "union";
    case SymmetryRule::Intersection: return "intersection";
    case SymmetryRule::None: return "none";
  }
  return "none";
}

SymmetryRule parse_symmetry_rule(const std::string& s) {
  if (s == "union") return SymmetryRule::Union;
  if (s == "intersection") return SymmetryRule::Intersection;
  if (s == "none") return SymmetryRule::None;
  throw UsageError("unknown symmetry rule '" + s + "' (expected union, intersection or none)");
}

SearchConfig SearchConfig::defaults(bool dense) {
  SearchConfig c;
  if (dense) c.eps_grow = c.eps_shrink = 0.001;
  return c;
}

void SearchConfig::validate() const {
  if (!(eps_grow >= 0.0) || !(eps_shrink >= 0.0)) throw UsageError("thresholds must be >= 0");
  if (patience < 0) throw UsageError("patience must be >= 0");
  if (max_subset < 0 || max_subset == 1) throw UsageError("subset cap M must be >= 2 (or 0 for auto)");
  if (samples < 1) throw UsageError("sample count K must be >= 1");
}

int growth_cap(const Scorer& scorer, const SearchConfig& cfg) {
  int m = scorer.max_subset();
  if (cfg.max_subset > 0) m = std::min(m, cfg.max_subset);
  return std::max(0, std::min(m - 1, scorer.dim() - 1));
}

GrowResult grow(int target, const Scorer& scorer, const SearchConfig& cfg) {
  const int d = scorer.dim();
  if (target < 0 || target >= d) throw UsageError("target out of range");
  const int cap = growth_cap(scorer, cfg);

  GrowResult out;
  VarSet mb;
  double current = scorer.entropy(target, mb);
  out.initial_entropy = current;
  int patience = 0;

  std::vector<int> candidates;
  for (int v = 0; v < d; ++v)
    if (v != target) candidates.push_back(v);

  while (!candidates.empty() && patience <= cfg.patience && static_cast<int>(mb.size()) < cap) {
    const std::vector<double> h = scorer.candidate_entropies(target, mb, candidates);
    std::size_t best = 0;
    for (std::size_t i = 1; i < h.size(); ++i)
      if (h[i] < h[best]) best = i;

    const int pick = candidates[best];
    if (current - h[best] > cfg.eps_grow)
      patience = 0;
    else
      ++patience;
    mb.insert(pick);
    out.grown.push_back(pick);
    out.trace.push_back({pick, h[best]});
    current = h[best];
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

std::vector<int> shrink(const std::vector<int>& grown, int target, const Scorer& scorer,
                        const SearchConfig& cfg, std::vector<TraceStep>* trace) {
  std::vector<int> members = grown;
  if (members.empty()) return members;
  VarSet set(members.begin(), members.end());
  double current = scorer.entropy(target, set);

  while (!members.empty()) {
    // Try removals in ascending index order so ties go to the lowest index.
    std::vector<int> sorted(set.begin(), set.end());
    int best = -1;
    double best_h = 0.0;
    for (int v : sorted) {
      VarSet without = set;
      without.erase(v);
      const double h = scorer.entropy(target, without);
      if (best < 0 || h < best_h) {
        best = v;
        best_h = h;
      }
    }
    if (best_h - current > cfg.eps_shrink) break;
    set.erase(best);
    members.erase(std::find(members.begin(), members.end(), best));
    current = best_h;
    if (trace) trace->push_back({best, best_h});
  }
  return members;
}

MbResult search_target(int target, const Scorer& scorer, const SearchConfig& cfg) {
  MbResult r;
  r.target = target;
  GrowResult g = grow(target, scorer, cfg);
  r.grown = std::move(g.grown);
  r.grow_trace = std::move(g.trace);
  r.initial_entropy = g.initial_entropy;
  r.members = shrink(r.grown, target, scorer, cfg, &r.shrink_trace);
  return r;
}

MbMap symmetry_correct(const MbMap& mbs, SymmetryRule rule) {
  if (rule == SymmetryRule::None) return mbs;
  auto contains = [&](int owner, int v) {
    auto it = mbs.find(owner);
    return it != mbs.end() && std::find(it->second.begin(), it->second.end(), v) != it->second.end();
  };
  MbMap out;
  if (rule == SymmetryRule::Intersection) {
    for (const auto& [i, list] : mbs) {
      auto& dst = out[i];
      for (int j : list)
        if (contains(j, i)) dst.push_back(j);
    }
    return out;
  }
  out = mbs;
  for (const auto& [j, list] : mbs) {
    for (int i : list) {
      auto& dst = out[i];
      if (std::find(dst.begin(), dst.end(), j) == dst.end()) dst.push_back(j);
    }
  }
  return out;
}

MbMap to_mb_map(const std::vector<MbResult>& results) {
  MbMap m;
  for (const auto& r : results) m[r.target] = r.members;
  return m;
}

namespace {

struct Failure {
  int target;
  std::string message;
  bool usage;
};

[[noreturn]] void report_failures(std::vector<Failure> failures) {
  std::sort(failures.begin(), failures.end(),
            [](const Failure& a, const Failure& b) { return a.target < b.target; });
  std::ostringstream s;
  s << "discovery failed for " << failures.size() << " target(s):";
  bool usage = false;
  for (const auto& f : failures) {
    s << "\n  target " << f.target << ": " << f.message;
    usage = usage || f.usage;
  }
  if (usage) throw UsageError(s.str());
  throw NumericalError(s.str());
}

Discovery run(const Scorer& scorer, const SearchConfig& cfg, int workers, bool parallel) {
  cfg.validate();
  const int d = scorer.dim();
  Discovery out;
  out.per_target.resize(d);
  std::vector<Failure> failures;
  std::mutex mu;

  auto one = [&](int t) {
    try {
      out.per_target[t] = search_target(t, scorer, cfg);
    } catch (const UsageError& e) {
      std::lock_guard lock(mu);
      failures.push_back({t, e.what(), true});
    } catch (const std::exception& e) {
      std::lock_guard lock(mu);
      failures.push_back({t, e.what(), false});
    }
  };

  if (parallel) {
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int t = 0; t < d; ++t) one(t);
  } else {
    for (int t = 0; t < d; ++t) one(t);
  }
  if (!failures.empty()) report_failures(std::move(failures));
  out.mb = symmetry_correct(to_mb_map(out.per_target), cfg.symmetry);
  return out;
}

}  // namespace

Discovery discover_all(const Scorer& scorer, const SearchConfig& cfg, int workers) {
  return run(scorer, cfg, workers, true);
}

Discovery discover_all_serial(const Scorer& scorer, const SearchConfig& cfg) {
  return run(scorer, cfg, 1, false);
}

}  // namespace fansmb
