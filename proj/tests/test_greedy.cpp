#include <atomic>

#include "fansmb/error.hpp"
#include "fansmb/greedy_mb.hpp"
#include "fansmb/oracle.hpp"
#include "helpers.hpp"

using namespace fansmb;

namespace {

SearchConfig oracle_cfg() { return OracleCheckConfig::defaults().search; }

// Counts entropy queries; optionally fails for one target.
class CountingScorer : public Scorer {
 public:
  explicit CountingScorer(CovMatrix cov, int failing = -1, bool numeric = true)
      : inner_(std::move(cov)), failing_(failing), numeric_(numeric) {}
  int dim() const override { return inner_.dim(); }
  std::string kind() const override { return "counting"; }
  double entropy(int target, const VarSet& cond) const override {
    ++calls;
    if (target == failing_) {
      if (numeric_) throw NumericalError("synthetic failure");
      throw UsageError("synthetic misuse");
    }
    return inner_.entropy(target, cond);
  }
  mutable std::atomic<long> calls{0};

 private:
  GaussianScorer inner_;
  int failing_;
  bool numeric_;
};

// Random SEM on d - 1 variables plus one independent unit-variance variable.
CovMatrix with_isolated(const CovMatrix& cov) {
  const int d = cov.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d + 1, d + 1);
  m.topLeftCorner(d, d) = cov.matrix();
  m(d, d) = 1.0;
  return CovMatrix(m);
}

bool symmetric(const MbMap& m) {
  for (const auto& [i, list] : m)
    for (int j : list) {
      auto it = m.find(j);
      if (it == m.end() || std::find(it->second.begin(), it->second.end(), i) == it->second.end()) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("grow on an independent target adds rho + 1 variables, lowest index first") {
  const GaussianScorer scorer(CovMatrix(Eigen::MatrixXd::Identity(12, 12)));
  SearchConfig cfg = SearchConfig::defaults();
  cfg.patience = 3;
  const GrowResult g = grow(5, scorer, cfg);
  CHECK(g.grown == std::vector<int>{0, 1, 2, 3});
  REQUIRE(g.trace.size() == 4);
  // Trace replay.
  VarSet s;
  for (const auto& step : g.trace) {
    s.insert(step.variable);
    CHECK(step.entropy == scorer.entropy(5, s));
    CHECK(g.initial_entropy - step.entropy <= cfg.eps_grow);
  }

  cfg.patience = 0;
  CHECK(grow(5, scorer, cfg).grown.size() == 1);
}

TEST_CASE("grow on a chain picks both neighbours first") {
  const Dag dag(3, {{0, 1}, {1, 2}});
  const CovMatrix cov(analytic_covariance(dag, {{{0, 1}, 1.0}, {{1, 2}, 1.0}}, {1, 1, 1}));
  const GaussianScorer scorer(cov);
  const GrowResult g = grow(1, scorer, SearchConfig::defaults());
  REQUIRE(g.grown.size() >= 2);
  CHECK(VarSet{g.grown[0], g.grown[1]} == VarSet{0, 2});
  CHECK(g.initial_entropy - g.trace[0].entropy > 0.005);
  CHECK(g.trace[0].entropy - g.trace[1].entropy > 0.005);
}

TEST_CASE("growth cap") {
  const GaussianScorer scorer(CovMatrix(Eigen::MatrixXd::Identity(10, 10)));
  SearchConfig cfg = SearchConfig::defaults();
  cfg.patience = 100;
  CHECK(growth_cap(scorer, cfg) == 9);
  CHECK(grow(0, scorer, cfg).grown.size() == 9);
  cfg.max_subset = 4;
  CHECK(growth_cap(scorer, cfg) == 3);
  CHECK(grow(0, scorer, cfg).grown.size() == 3);
}

TEST_CASE("shrink keeps an exact MB and drops an unrelated extra first") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianSem sem = random_gaussian_sem(6, 2.0, rng());
    const CovMatrix cov = with_isolated(sem.cov);
    const GaussianScorer scorer(cov);
    const SearchConfig cfg = SearchConfig::defaults();
    for (int t = 0; t < 6; ++t) {
      const VarSet mb = markov_boundary_of(sem.dag, t);
      const std::vector<int> exact(mb.begin(), mb.end());
      std::vector<TraceStep> trace;
      CHECK(shrink(exact, t, scorer, oracle_cfg(), &trace) == exact);
      CHECK(trace.empty());

      std::vector<int> padded = exact;
      padded.push_back(6);
      trace.clear();
      const auto kept = shrink(padded, t, scorer, cfg, &trace);
      REQUIRE_FALSE(trace.empty());
      CHECK(trace.front().variable == 6);
      CHECK(std::find(kept.begin(), kept.end(), 6) == kept.end());
    }
  }
  const GaussianScorer s(CovMatrix(Eigen::MatrixXd::Identity(3, 3)));
  CHECK(shrink({}, 0, s, SearchConfig::defaults()).empty());
}

TEST_CASE("shrink preserves growing order among survivors") {
  const Dag dag(4, {{0, 1}, {2, 1}});
  const CovMatrix cov(analytic_covariance(dag, {{{0, 1}, 1.0}, {{2, 1}, -1.5}}, {1, 1, 1, 1}));
  const GaussianScorer scorer(cov);
  CHECK(shrink({2, 3, 0}, 1, scorer, oracle_cfg()) == std::vector<int>{2, 0});
}

TEST_CASE("oracle discovery recovers every true MB on random d=6 SEMs") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const GaussianSem sem = random_gaussian_sem(6, 2.0, rng());
    const Discovery found = discover_all(GaussianScorer(sem.cov), oracle_cfg(), 1);
    for (int t = 0; t < 6; ++t) {
      const auto& list = found.mb.at(t);
      CHECK(VarSet(list.begin(), list.end()) == markov_boundary_of(sem.dag, t));
      // Gap non-negativity at MB+.
      const auto& grown = found.per_target[t].grown;
      CHECK(gaussian_cond_entropy(sem.cov, t, VarSet(grown.begin(), grown.end())) >=
            gaussian_cond_entropy(sem.cov, t, markov_boundary_of(sem.dag, t)) - 1e-9);
    }
  }
}

TEST_CASE("discovery output does not depend on the worker count") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const GaussianSem sem = random_gaussian_sem(8, 2.0, rng());
    const GaussianScorer scorer(sem.cov);
    const SearchConfig cfg = SearchConfig::defaults();
    const Discovery a = discover_all(scorer, cfg, 1);
    const Discovery b = discover_all(scorer, cfg, 8);
    const Discovery c = discover_all_serial(scorer, cfg);
    CHECK(a.mb == b.mb);
    CHECK(a.mb == c.mb);
    CHECK(a.per_target == b.per_target);
  }
}

TEST_CASE("single-variable discovery gives one empty MB") {
  const Discovery d = discover_all(GaussianScorer(CovMatrix(Eigen::MatrixXd::Identity(1, 1))), oracle_cfg());
  REQUIRE(d.mb.size() == 1);
  CHECK(d.mb.at(0).empty());
}

TEST_CASE("member lists are duplicate-free, exclude the target and replay their traces") {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const GaussianSem sem = random_gaussian_sem(8, 2.5, rng());
    const GaussianScorer scorer(sem.cov);
    const SearchConfig cfg = SearchConfig::defaults();
    for (int t = 0; t < 8; ++t) {
      const MbResult r = search_target(t, scorer, cfg);
      const VarSet members(r.members.begin(), r.members.end());
      CHECK(members.size() == r.members.size());
      CHECK_FALSE(members.contains(t));
      std::vector<int> replay = r.grown;
      for (const auto& step : r.shrink_trace) replay.erase(std::find(replay.begin(), replay.end(), step.variable));
      CHECK(replay == r.members);
      CHECK(r.initial_entropy == scorer.entropy(t, {}));
    }
  }
}

TEST_CASE("scorer call counts stay within the search complexity") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 12;
    const GaussianSem sem = random_gaussian_sem(d, 2.0, rng());
    SearchConfig cfg = SearchConfig::defaults();
    cfg.patience = 3;
    for (int t = 0; t < d; ++t) {
      CountingScorer scorer(sem.cov);
      const GrowResult g = grow(t, scorer, cfg);
      const long grow_calls = scorer.calls.load();
      const long k = static_cast<long>(g.grown.size());
      CHECK(k <= cfg.patience + 1 + static_cast<long>(markov_boundary_of(sem.dag, t).size()) + d);
      CHECK(grow_calls <= 1 + k * (d - 1));
      scorer.calls = 0;
      shrink(g.grown, t, scorer, cfg);
      CHECK(scorer.calls.load() <= 1 + k * (k + 1) / 2 + k);
    }
  }
}

TEST_CASE("symmetry correction") {
  const MbMap asym{{0, {1}}, {1, {}}};
  CHECK(symmetry_correct(asym, SymmetryRule::Union) == MbMap{{0, {1}}, {1, {0}}});
  CHECK(symmetry_correct(asym, SymmetryRule::Intersection) == MbMap{{0, {}}, {1, {}}});
  CHECK(symmetry_correct(asym, SymmetryRule::None) == asym);
  const MbMap sym{{0, {2, 1}}, {1, {0}}, {2, {0}}};
  CHECK(symmetry_correct(sym, SymmetryRule::Union) == sym);
  CHECK(symmetry_correct(sym, SymmetryRule::Intersection) == sym);

  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    MbMap m;
    for (int i = 0; i < 7; ++i) {
      auto& l = m[i];
      for (int j = 0; j < 7; ++j)
        if (j != i && rng() % 3 == 0) l.push_back(j);
    }
    CHECK(symmetric(symmetry_correct(m, SymmetryRule::Union)));
    CHECK(symmetric(symmetry_correct(m, SymmetryRule::Intersection)));
  }
  CHECK(parse_symmetry_rule("intersection") == SymmetryRule::Intersection);
  CHECK_THROWS_AS(parse_symmetry_rule("xor"), UsageError);
}

TEST_CASE("failures are collected and reported per target") {
  const CovMatrix cov(Eigen::MatrixXd::Identity(5, 5));
  try {
    discover_all(CountingScorer(cov, 3), oracle_cfg(), 2);
    FAIL("expected a failure");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("target 3") != std::string::npos);
  }
  CHECK_THROWS_AS(discover_all(CountingScorer(cov, 1, false), oracle_cfg(), 2), UsageError);
}

TEST_CASE("search config validation and defaults") {
  SearchConfig c = SearchConfig::defaults(true);
  CHECK(c.eps_grow == 0.001);
  CHECK(c.eps_shrink == 0.001);
  c = SearchConfig::defaults();
  CHECK(c.eps_grow == 0.005);
  CHECK(c.eps_shrink == 0.002);
  CHECK(c.patience == 15);
  CHECK(c.samples == 1000);
  CHECK(c.symmetry == SymmetryRule::Union);
  c.eps_grow = -1;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = SearchConfig::defaults();
  c.patience = -1;
  CHECK_THROWS_AS(c.validate(), UsageError);
}
