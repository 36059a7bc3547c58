#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "relset/explain.hpp"
#include "relset/oracle.hpp"

using namespace relset;
using namespace testutil;

namespace {
constexpr int kM = 9;

void check_trace(const Explanation& ex, const std::vector<std::tuple<int, Rational, bool>>& expected) {
  REQUIRE(ex.trace.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(ex.trace[i].feature == std::get<0>(expected[i]));
    CHECK(ex.trace[i].candidate == std::get<1>(expected[i]));
    CHECK(ex.trace[i].kept == std::get<2>(expected[i]));
  }
}
}  // namespace

TEST_CASE("running-example deletion trace, path-mass check") {
  auto ex = min_relevant_set(fig1(), fig1_paths(), fig1_instance(), Rational(3, 100),
                             Ordering::given({1, 2, 3, 4, 9}), ids(kM, {1, 2, 3, 4, 9}), CandidateCheck::paths);
  check_trace(ex, {{1, Rational(1, 2), true},
                   {2, Rational(1, 64), false},
                   {3, Rational(3, 128), false},
                   {4, Rational(7, 256), false},
                   {9, Rational(15, 256), true}});
  CHECK(ex.trace.back().candidate > Rational(3, 100));
  CHECK(ex.subset == std::vector<int>{1, 9});
  CHECK(ex.epsilon == Rational(7, 256));
  CHECK(ex.precision == Rational(57, 64));
}

TEST_CASE("running-example deletion trace, exact check: same decisions") {
  auto ex = min_relevant_set(fig1(), fig1_paths(), fig1_instance(), Rational(3, 100),
                             Ordering::given({1, 2, 3, 4, 9}), ids(kM, {1, 2, 3, 4, 9}), CandidateCheck::exact);
  check_trace(ex, {{1, Rational(1, 32), true},
                   {2, Rational(1, 256), false},
                   {3, Rational(3, 256), false},
                   {4, Rational(7, 256), false},
                   {9, Rational(15, 256), true}});
  CHECK(ex.subset == std::vector<int>{1, 9});
  CHECK(ex.epsilon == Rational(7, 256));
}

TEST_CASE("delta = 0 from the full feature set recovers the abductive explanation") {
  auto ex = min_relevant_set(fig1(), fig1_paths(), fig1_instance(), Rational(0));
  CHECK(ex.subset == std::vector<int>{1, 2, 3, 4, 9});
  CHECK(ex.epsilon == Rational(0));
  CHECK(ex.precision == Rational(1));
  CHECK(ex.trace.size() == 9);  // every feature tried once

  // Every point that agrees with v on the subset is classified c (2^9 sweep).
  const TreeModel& model = fig1();
  const Instance& inst = fig1_instance();
  Bitset subset = Bitset::from_ids(kM, ex.subset);
  for (int mask = 0; mask < (1 << kM); ++mask) {
    std::vector<int> point(kM);
    bool in_slice = true;
    for (int f = 0; f < kM; ++f) {
      point[f] = (mask >> f) & 1;
      if (subset.test(f) && point[f] != inst.values[f]) in_slice = false;
    }
    if (in_slice) REQUIRE(classify(model, point) == inst.class_index);
  }
}

TEST_CASE("delta = 1 drops everything") {
  auto ex = min_relevant_set(fig1(), fig1_paths(), fig1_instance(), Rational(1));
  CHECK(ex.subset.empty());
  for (const auto& step : ex.trace) CHECK(!step.kept);
}

TEST_CASE("infeasible seeds are rejected") {
  CHECK_THROWS_AS(
      min_relevant_set(fig1(), fig1_paths(), fig1_instance(), Rational(0), Ordering::ascending(), ids(kM, {2, 3})),
      InfeasibleSeed);
  // The full set is always feasible.
  CHECK_NOTHROW(min_relevant_set(fig1(), fig1_paths(), fig1_instance(), Rational(0), Ordering::ascending(),
                                 Bitset(kM, true)));
}

TEST_CASE("explicit order is honored and the trace covers the whole seed") {
  auto ex = min_relevant_set(fig1(), fig1_paths(), fig1_instance(), Rational(3, 100), Ordering::given({9, 1}),
                             ids(kM, {1, 2, 3, 4, 9}), CandidateCheck::exact);
  REQUIRE(ex.trace.size() == 5);
  CHECK(ex.trace[0].feature == 9);
  CHECK(ex.trace[1].feature == 1);
  // Remaining seed features follow in ascending order.
  CHECK(ex.trace[2].feature == 2);
  CHECK(ex.trace[3].feature == 3);
  CHECK(ex.trace[4].feature == 4);
}

TEST_CASE("greedy order still yields a relevant, minimal subset") {
  auto ex = min_relevant_set(fig1(), fig1_paths(), fig1_instance(), Rational(3, 100), Ordering::greedy());
  CHECK(ex.trace.size() == 9);
  auto check = check_relevant_set(fig1_paths(), fig1_instance(), Rational(3, 100),
                                  Bitset::from_ids(kM, ex.subset), fig1().space);
  CHECK(check.relevant);
  CHECK(check.minimal);
}

TEST_CASE("check_relevant_set on the running example") {
  const auto& paths = fig1_paths();
  const Instance& inst = fig1_instance();
  const FeatureSpace& space = fig1().space;

  auto good = check_relevant_set(paths, inst, Rational(3, 100), ids(kM, {1, 9}), space);
  CHECK(good.relevant);
  CHECK(good.minimal);
  CHECK(good.epsilon == Rational(7, 256));

  // {2,3,4,9} leaves the x1=0 path alive with mass 1/32 > 3/100.
  auto bad = check_relevant_set(paths, inst, Rational(3, 100), ids(kM, {2, 3, 4, 9}), space);
  CHECK(!bad.relevant);

  // The full set is relevant at delta = 0 but not minimal: the features
  // untested on the instance's branch can be dropped for free.
  auto full = check_relevant_set(paths, inst, Rational(0), Bitset(kM, true), space);
  CHECK(full.relevant);
  CHECK(!full.minimal);

  auto axp = check_relevant_set(paths, inst, Rational(0), ids(kM, {1, 2, 3, 4, 9}), space);
  CHECK(axp.relevant);
  CHECK(axp.minimal);
}

TEST_CASE("deletion output always passes check_relevant_set as minimal (exact mode)") {
  std::mt19937_64 rng(31337);
  for (uint64_t seed = 0; seed < 25; ++seed) {
    TreeGenParams params;
    params.seed = 7000 + seed;
    params.feature_count = 4 + static_cast<int>(seed % 6);
    params.weighted = seed % 3 == 0;
    params.class_count = 2 + static_cast<int>(seed % 2);
    TreeModel model = generate_tree(params);
    auto paths = enumerate_paths(model);
    const int m = model.space.size();
    Instance inst = make_instance(model, random_point(model, rng));
    for (const Rational& delta : {Rational(0), Rational(1, 100), Rational(1, 8), Rational(1, 2)}) {
      auto ex = min_relevant_set(model, paths, inst, delta);
      REQUIRE(ex.trace.size() == static_cast<size_t>(m));
      auto check = check_relevant_set(paths, inst, delta, Bitset::from_ids(m, ex.subset), model.space);
      CHECK(check.relevant);
      CHECK(check.minimal);
      CHECK(check.epsilon == ex.epsilon);
      CHECK(ex.epsilon <= delta);
    }
  }
}

TEST_CASE("path-mass mode output is always relevant and a superset-sound bound") {
  std::mt19937_64 rng(999);
  for (uint64_t seed = 0; seed < 15; ++seed) {
    TreeGenParams params;
    params.seed = 7700 + seed;
    params.feature_count = 4 + static_cast<int>(seed % 5);
    TreeModel model = generate_tree(params);
    auto paths = enumerate_paths(model);
    Instance inst = make_instance(model, random_point(model, rng));
    Rational delta(1, 10);
    auto ex = min_relevant_set(model, paths, inst, delta, Ordering::ascending(), std::nullopt, CandidateCheck::paths);
    CHECK(ex.epsilon <= delta);  // the bound dominates the exact error
    // Each step's candidate dominates the exact error of the same subset.
    Bitset current(model.space.size(), true);
    for (const auto& step : ex.trace) {
      Bitset candidate = current.without(step.feature - 1);
      CHECK(step.candidate >= error_mass(paths, inst, candidate, model.space));
      if (!step.kept) current = candidate;
    }
  }
}

TEST_CASE("subset is always contained in the seed, deterministic reruns") {
  std::mt19937_64 rng(5);
  TreeGenParams params;
  params.seed = 8080;
  params.feature_count = 7;
  TreeModel model = generate_tree(params);
  auto paths = enumerate_paths(model);
  Instance inst = make_instance(model, random_point(model, rng));
  Bitset seed_set(7);
  seed_set.set(1);
  seed_set.set(3);
  seed_set.set(5);
  Rational delta = error_mass(paths, inst, seed_set, model.space);  // feasible by construction
  auto a = min_relevant_set(model, paths, inst, delta, Ordering::ascending(), seed_set);
  auto b = min_relevant_set(model, paths, inst, delta, Ordering::ascending(), seed_set);
  CHECK(a.subset == b.subset);
  CHECK(a.trace.size() == 3);
  for (int id : a.subset) CHECK(seed_set.test(id - 1));
}

TEST_CASE("relaxing delta never invalidates the guarantee") {
  const auto& paths = fig1_paths();
  for (const Rational& delta : {Rational(0), Rational(3, 100), Rational(1, 8), Rational(1, 2), Rational(1)}) {
    auto ex = min_relevant_set(fig1(), paths, fig1_instance(), delta);
    CHECK(ex.epsilon <= delta);
    CHECK(ex.subset.size() <= 9u);
  }
}

TEST_CASE("minimum-cardinality search on the running example") {
  const auto& paths = fig1_paths();
  // delta = 1 demands precision exactly 1; the smallest such set has 5 features.
  auto ex = min_cardinality_relevant_set(fig1(), paths, fig1_instance(), Rational(1));
  CHECK(ex.subset == std::vector<int>{1, 2, 3, 4, 9});
  CHECK(ex.precision == Rational(1));
  CHECK(ex.epsilon == Rational(0));

  // delta = 0 is satisfied by the empty set.
  auto empty = min_cardinality_relevant_set(fig1(), paths, fig1_instance(), Rational(0));
  CHECK(empty.subset.empty());

  CHECK_THROWS_AS(min_cardinality_relevant_set(fig1(), paths, fig1_instance(), Rational(1), 3), BudgetExhausted);
  try {
    min_cardinality_relevant_set(fig1(), paths, fig1_instance(), Rational(1), 3);
  } catch (const BudgetExhausted& e) {
    CHECK(e.searched_up_to == 3);
    CHECK(e.feasible_upper_bound == 9);
  }
}

TEST_CASE("minimum-cardinality size matches the brute subset scan") {
  std::mt19937_64 rng(606);
  for (uint64_t seed = 0; seed < 12; ++seed) {
    TreeGenParams params;
    params.seed = 9000 + seed;
    params.feature_count = 8;
    params.weighted = seed % 4 == 0;
    TreeModel model = generate_tree(params);
    auto paths = enumerate_paths(model);
    const int m = model.space.size();
    Instance inst = make_instance(model, random_point(model, rng));
    Rational delta(9, 10);

    auto ex = min_cardinality_relevant_set(model, paths, inst, delta);

    int best = m + 1;
    std::vector<int> best_ids;
    for (int mask = 0; mask < (1 << m); ++mask) {
      Bitset subset(m);
      for (int f = 0; f < m; ++f)
        if (mask & (1 << f)) subset.set(f);
      if (subset.count() >= best) continue;
      if (precision(paths, inst, subset, model.space) >= delta) {
        best = subset.count();
        best_ids = subset.to_ids();
      }
    }
    REQUIRE(best <= m);
    CHECK(static_cast<int>(ex.subset.size()) == best);
    CHECK(precision(paths, inst, Bitset::from_ids(m, ex.subset), model.space) >= delta);

    // Cardinality-minimal output is subset-minimal by exhaustion: no proper
    // subset qualifies at any smaller size.
    Bitset found = Bitset::from_ids(m, ex.subset);
    for (int mask = 0; mask < (1 << m); ++mask) {
      Bitset subset(m);
      for (int f = 0; f < m; ++f)
        if (mask & (1 << f)) subset.set(f);
      if (subset.count() < found.count() && subset.is_subset_of(found))
        CHECK(precision(paths, inst, subset, model.space) < delta);
    }
  }
}

TEST_CASE("deletion candidates match a fresh measure evaluation step by step") {
  // The incremental engine inside the deletion loop must agree with the
  // straightforward O(paths x features) evaluation it replaces.
  std::mt19937_64 rng(112);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    TreeGenParams params;
    params.seed = 11000 + seed;
    params.feature_count = 6;
    params.weighted = seed % 2;
    TreeModel model = generate_tree(params);
    auto paths = enumerate_paths(model);
    const int m = model.space.size();
    Instance inst = make_instance(model, random_point(model, rng));
    Rational delta(1, 7);
    auto ex = min_relevant_set(model, paths, inst, delta);
    Bitset current(m, true);
    for (const auto& step : ex.trace) {
      Bitset candidate = current.without(step.feature - 1);
      CHECK(step.candidate == error_mass(paths, inst, candidate, model.space));
      if (!step.kept) current = candidate;
    }
  }
}
