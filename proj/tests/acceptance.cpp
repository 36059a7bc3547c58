// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria are self-contained and timed against their budgets.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "relset/enumerate.hpp"
#include "relset/explain.hpp"
#include "relset/measure.hpp"
#include "relset/model.hpp"
#include "relset/oracle.hpp"

using namespace relset;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw CheckFailure(what);
}

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(RELSET_TEST_DATA) + "/" + name, std::ios::binary);
  if (!in) throw CheckFailure("missing fixture " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Bitset ids(int m, std::initializer_list<int> feature_ids) {
  Bitset b(m);
  for (int id : feature_ids) b.set(id - 1);
  return b;
}

std::vector<std::vector<int>> canon(std::vector<std::vector<int>> family) {
  std::sort(family.begin(), family.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return family;
}

struct RunningExample {
  TreeModel model;
  std::vector<Path> paths;
  Instance inst;
};

RunningExample running_example() {
  RunningExample ex;
  ex.model = parse_document(fixture("fig1.json"));
  ex.paths = enumerate_paths(ex.model);
  ex.inst = make_instance(ex.model, {1, 1, 1, 1, 0, 0, 0, 0, 1});
  return ex;
}

const Path& path_to_leaf(const RunningExample& ex, const std::string& leaf_id) {
  for (const auto& p : ex.paths)
    if (ex.model.tree.nodes[p.nodes.back()].id.text == leaf_id) return p;
  throw CheckFailure("no path ends at node " + leaf_id);
}

// --- criteria ---------------------------------------------------------

void criterion1() {
  auto ex = running_example();
  expect(ex.paths.size() == 18, "expected 18 paths");
  int wrong = 0;
  for (const auto& p : ex.paths)
    if (ex.model.tree.classes[p.class_index].text == "0") ++wrong;
  expect(wrong == 5, "expected 5 paths of class 0");

  // Reference monomials at alpha = beta = 1/2, paths named by leaf node.
  const std::vector<std::pair<std::string, Rational>> expected = {
      {"2", Rational(1, 2)},    // alpha
      {"24", Rational(1, 64)},  // alpha^4 beta^2
      {"30", Rational(1, 128)}, // alpha^4 beta^3
      {"34", Rational(1, 256)}, // alpha^4 beta^4
      {"22", Rational(1, 32)},  // alpha beta^4
      {"23", Rational(1, 32)},  // beta^5
      {"25", Rational(1, 64)},  // alpha^3 beta^3
  };
  for (const auto& [leaf, prob] : expected)
    expect(path_probability(path_to_leaf(ex, leaf), ex.model.space) == prob,
           "path to leaf " + leaf + " has probability " +
               path_probability(path_to_leaf(ex, leaf), ex.model.space).ratio_string() + ", expected " +
               prob.ratio_string());

  Rational total;
  for (const auto& p : ex.paths) total += path_probability(p, ex.model.space);
  expect(total == Rational(1), "path probabilities sum to " + total.ratio_string() + ", expected exactly 1");
}

void criterion2() {
  auto ex = running_example();
  const Rational delta(3, 100);
  auto order = Ordering::given({1, 2, 3, 4, 9});
  auto seed = ids(9, {1, 2, 3, 4, 9});

  auto result = min_relevant_set(ex.model, ex.paths, ex.inst, delta, order, seed, CandidateCheck::paths);
  const std::vector<std::tuple<int, Rational, bool>> table = {
      {1, Rational(1, 2), true},
      {2, Rational(1, 64), false},
      {3, Rational(3, 128), false},
      {4, Rational(7, 256), false},
  };
  expect(result.trace.size() == 5, "trace must have 5 steps");
  for (size_t i = 0; i < table.size(); ++i) {
    const auto& [feature, value, kept] = table[i];
    expect(result.trace[i].feature == feature, "step order mismatch");
    expect(result.trace[i].candidate == value,
           "step " + std::to_string(i + 1) + " candidate " + result.trace[i].candidate.ratio_string() + ", expected " +
               value.ratio_string());
    expect(result.trace[i].kept == kept, "step decision mismatch");
  }
  expect(result.trace[4].feature == 9 && result.trace[4].kept, "feature 9 must be kept last");
  expect(result.trace[4].candidate > delta, "final candidate must exceed 3/100");
  expect(result.subset == std::vector<int>{1, 9}, "result must be {1,9}");

  // The exact-error check makes the same decisions and returns the same set.
  auto exact = min_relevant_set(ex.model, ex.paths, ex.inst, delta, order, seed, CandidateCheck::exact);
  expect(exact.subset == result.subset, "exact-check run must also return {1,9}");
  expect(exact.epsilon == Rational(7, 256), "exact error of {1,9} must be 7/256");
}

void criterion3() {
  auto ex = running_example();
  Bitset axp = ids(9, {1, 2, 3, 4, 9});
  expect(error_mass(ex.paths, ex.inst, axp, ex.model.space) == Rational(0), "{1,2,3,4,9} must have zero error");

  auto result = min_relevant_set(ex.model, ex.paths, ex.inst, Rational(0));
  expect(result.subset == std::vector<int>{1, 2, 3, 4, 9}, "delta-0 output must be {1,2,3,4,9}");

  // Brute sweep of all 2^9 points: fixing the output forces the prediction.
  Bitset subset = Bitset::from_ids(9, result.subset);
  for (int mask = 0; mask < (1 << 9); ++mask) {
    std::vector<int> point(9);
    bool in_slice = true;
    for (int f = 0; f < 9; ++f) {
      point[f] = (mask >> f) & 1;
      if (subset.test(f) && point[f] != ex.inst.values[f]) in_slice = false;
    }
    if (in_slice)
      expect(classify(ex.model, point) == ex.inst.class_index, "a point agreeing on the subset changes the prediction");
  }
}

void criterion4() {
  std::mt19937_64 rng(20260810);
  int trees = 0, subset_checks = 0, mincard_checks = 0, family_checks = 0;
  for (uint64_t i = 0; i < 50; ++i) {
    TreeGenParams params;
    params.seed = 61000 + i;
    params.feature_count = 4 + static_cast<int>(i % 9);  // 4..12
    params.max_domain = 3;
    params.max_depth = 6;
    params.weighted = i % 4 == 0;
    params.class_count = 2 + static_cast<int>(i % 2);
    TreeModel model = generate_tree(params);
    auto paths = enumerate_paths(model);
    const int m = model.space.size();
    Instance inst = make_instance(model, random_point(model, rng));
    ++trees;

    for (int s = 0; s < 20; ++s) {
      Bitset subset = random_subset(m, rng);
      BruteReport brute = brute_measures(model, inst, subset);
      expect(error_mass(paths, inst, subset, model.space) == brute.epsilon, "epsilon disagrees with the oracle");
      expect(precision(paths, inst, subset, model.space) == brute.precision, "precision disagrees with the oracle");
      expect(fix_probability(inst, subset, model.space) == brute.fix_prob, "fix_prob disagrees with the oracle");
      ++subset_checks;
    }

    if (m <= 10) {
      const Rational delta(9, 10);
      auto found = min_cardinality_relevant_set(model, paths, inst, delta);
      int best = m + 1;
      for (int mask = 0; mask < (1 << m); ++mask) {
        Bitset subset(m);
        for (int f = 0; f < m; ++f)
          if (mask & (1 << f)) subset.set(f);
        if (subset.count() < best && precision(paths, inst, subset, model.space) >= delta)
          best = subset.count();
      }
      expect(static_cast<int>(found.subset.size()) == best, "min-cardinality size disagrees with the brute minimum");
      ++mincard_checks;
    }

    if (m <= 10) {
      const Rational delta(1, 8);
      std::vector<std::vector<int>> engine;
      for (const auto& e : enumerate_min_relevant(model, paths, inst, delta)) engine.push_back(e.subset);
      expect(canon(engine) == canon(brute_minimal_relevant(model, inst, delta)),
             "minimal relevant families disagree with the oracle");
      expect(canon(enumerate_min_duals(model, paths, inst, delta)) == canon(brute_minimal_duals(model, inst, delta)),
             "minimal dual families disagree with the oracle");
      ++family_checks;
    }
  }
  expect(trees >= 50 && subset_checks >= 1000, "coverage shortfall");
  expect(mincard_checks >= 20 && family_checks >= 20, "small-m coverage shortfall");
  std::cout << "      (" << trees << " trees, " << subset_checks << " subset agreements, " << mincard_checks
            << " min-cardinality checks, " << family_checks << " family checks) ";
}

void criterion5() {
  std::mt19937_64 rng(5150);
  int pairs = 0;
  for (uint64_t i = 0; pairs < 1000; ++i) {
    TreeGenParams params;
    params.seed = 71000 + i;
    params.feature_count = 4 + static_cast<int>(i % 7);
    params.weighted = i % 3 == 0;
    TreeModel model = generate_tree(params);
    auto paths = enumerate_paths(model);
    const int m = model.space.size();
    Instance inst = make_instance(model, random_point(model, rng));
    for (int k = 0; k < 25 && pairs < 1000; ++k, ++pairs) {
      Bitset big = random_subset(m, rng);
      Bitset small = big;
      big.for_each([&](int f) {
        if (rng() & 1) small.reset(f);
      });
      expect(error_mass(paths, inst, big, model.space) <= error_mass(paths, inst, small, model.space),
             "monotonicity violated");
    }
  }
  expect(pairs >= 1000, "needs at least 1000 nested pairs");
}

void criterion6() {
  std::mt19937_64 rng(6);
  int checked = 0;
  for (uint64_t i = 0; i < 20; ++i) {
    TreeGenParams params;
    params.seed = 81000 + i;
    params.feature_count = 4 + static_cast<int>(i % 5);  // up to 8
    params.weighted = i % 5 == 0;
    TreeModel model = generate_tree(params);
    auto paths = enumerate_paths(model);
    const int m = model.space.size();
    Instance inst = make_instance(model, random_point(model, rng));
    for (const Rational& delta : {Rational(0), Rational(1, 8), Rational(1, 4)}) {
      std::vector<std::vector<int>> cmin;
      for (const auto& e : enumerate_min_relevant(model, paths, inst, delta)) cmin.push_back(e.subset);
      auto dmin = enumerate_min_duals(model, paths, inst, delta);
      auto violation = verify_duality(cmin, dmin, m);
      expect(!violation.has_value(), "duality violated: " + (violation ? violation->reason : ""));
      ++checked;
    }
  }
  expect(checked == 60, "expected 60 duality checks");
}

void criterion7() {
  TreeGenParams params;
  params.seed = 907;
  params.feature_count = 40;
  params.max_domain = 2;
  params.target_nodes = 9000;
  TreeModel model = generate_tree(params);
  expect(static_cast<int>(model.tree.nodes.size()) >= 9000,
         "tree has " + std::to_string(model.tree.nodes.size()) + " nodes, need >= 9000");
  expect(validate_tree(model.tree, model.space).empty(), "generated tree must validate");
  auto paths = enumerate_paths(model);

  std::mt19937_64 rng(11);
  std::cout << "      (" << model.tree.nodes.size() << " nodes, " << paths.size() << " paths; per-instance: ";
  for (int i = 0; i < 5; ++i) {
    Instance inst = make_instance(model, random_point(model, rng));
    auto start = std::chrono::steady_clock::now();
    auto result = min_relevant_set(model, paths, inst, Rational(1, 100));
    auto stop = std::chrono::steady_clock::now();
    double seconds = std::chrono::duration<double>(stop - start).count();
    std::cout << (i ? " " : "") << std::fixed << seconds << "s";
    expect(seconds < 1.0, "an explanation took " + std::to_string(seconds) + "s, budget is 1s");
    expect(result.epsilon <= Rational(1, 100), "explanation exceeds the threshold");
  }
  std::cout << ") ";
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<void()> run;
};

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "running-example path probabilities (18 paths, exact monomials, total 1)", 1.0, criterion1},
      {2, "reference deletion trace: delta 3/100, seed {1,2,3,4,9}, order <1,2,3,4,9> -> {1,9}", 1.0, criterion2},
      {3, "delta-0 output is the abductive explanation, confirmed over all 2^9 points", 5.0, criterion3},
      {4, "oracle equivalence on 50 seeded trees (measures, min-cardinality, families)", 300.0, criterion4},
      {5, "error monotonicity over 1000 nested subset pairs", 60.0, criterion5},
      {6, "hitting-set duality on 20 trees x 3 deltas", 120.0, criterion6},
      {7, "performance: 9000-node, 40-feature tree explained in under 1s per instance", 0.0, criterion7},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string failure;
    try {
      c.run();
    } catch (const std::exception& e) {
      failure = e.what();
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (failure.empty() && c.budget_seconds > 0 && elapsed > c.budget_seconds)
      failure = "exceeded time budget of " + std::to_string(c.budget_seconds) + "s";
    if (failure.empty()) {
      printf("[%d] PASS %s (%.2fs)\n", c.id, c.name.c_str(), elapsed);
    } else {
      printf("[%d] FAIL %s (%.2fs): %s\n", c.id, c.name.c_str(), elapsed, failure.c_str());
      ++failures;
    }
  }
  printf("[8] NOTE dataset-scale aggregate reproduction is out of scope (externally trained models and a\n");
  printf("    sampling-based metric); criteria 1-7 stand in as the exact property and golden suite.\n");
  printf("RESULT: %zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
