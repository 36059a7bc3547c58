#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "relset/model.hpp"

namespace relset {

// Reference implementations that enumerate feature-space points (never tree
// paths), used by tests and the verify command as an independent check on the
// measure engine. Deliberately slow; capped instead of optimized.
struct BruteReport {
  Bitset subset;
  Rational epsilon;
  Rational precision;
  Rational fix_prob;
  long long points_examined = 0;
};

struct OracleCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

BruteReport brute_measures(const TreeModel& model, const Instance& inst, const Bitset& subset,
                           uint64_t point_cap = uint64_t(1) << 24);

// All subset-minimal S with error(S) <= delta over the full 2^m lattice,
// canonical (size, lexicographic) order. Requires m <= 12.
std::vector<std::vector<int>> brute_minimal_relevant(const TreeModel& model, const Instance& inst, const Rational& delta,
                                                     uint64_t point_cap = uint64_t(1) << 24);
std::vector<std::vector<int>> brute_minimal_duals(const TreeModel& model, const Instance& inst, const Rational& delta,
                                                  uint64_t point_cap = uint64_t(1) << 24);

// Minimal hitting sets by recursive branching on an unhit member; a second
// algorithmic route besides the subset scan in the enumerate module.
std::vector<std::vector<int>> mhs_by_branching(const std::vector<std::vector<int>>& family, int feature_count);

// Seeded pseudo-random valid trees for property tests. Same parameters and
// seed reproduce the same tree on any platform (mt19937_64 plus plain modulo,
// no library distributions).
struct TreeGenParams {
  uint64_t seed = 1;
  int feature_count = 6;
  int min_domain = 2;
  int max_domain = 3;
  int max_depth = 6;
  int class_count = 2;
  int leaf_bias_percent = 25;  // chance an expandable node stops early
  int class_skew_percent = 50; // chance a leaf takes class 0
  int target_nodes = 0;        // > 0: grow breadth-first to this node count
  bool weighted = false;       // random exact weights instead of uniform
};

TreeModel generate_tree(const TreeGenParams& params);

std::vector<int> random_point(const TreeModel& model, std::mt19937_64& rng);
Bitset random_subset(int feature_count, std::mt19937_64& rng);

}  // namespace relset
