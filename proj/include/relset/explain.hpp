#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relset/measure.hpp"
#include "relset/model.hpp"

namespace relset {

// How the deletion loop prices a candidate subset:
//   exact  - the joint error mass Pr(class(x) != c and x_S = v_S); the output
//            is one-deletion minimal for that measure.
//   paths  - the total probability of every wrong-class path still consistent
//            with v on S. An upper bound on the exact error (a path keeps its
//            full mass even where the fixed slice covers only part of it);
//            also monotone, so the invariant argument carries over.
enum class CandidateCheck { exact, paths };

struct Ordering {
  enum class Kind { ascending, given, greedy };
  Kind kind = Kind::ascending;
  std::vector<int> features;  // 1-based ids, for Kind::given

  static Ordering ascending() { return {}; }
  static Ordering given(std::vector<int> ids) { return {Kind::given, std::move(ids)}; }
  static Ordering greedy() { return {Kind::greedy, {}}; }
};

struct DeletionStep {
  int feature = 0;  // 1-based id that was tried
  Rational candidate;  // error of the subset with this feature removed
  bool kept = false;
};

enum class ExplanationKind { subset_minimal, min_cardinality };

struct Explanation {
  std::vector<int> subset;  // sorted 1-based feature ids
  Rational epsilon;         // exact joint error of `subset`
  Rational precision;       // exact conditional precision of `subset`
  Rational delta;
  ExplanationKind kind = ExplanationKind::subset_minimal;
  std::vector<DeletionStep> trace;  // one entry per seed feature, deletion order
};

struct RelevanceCheck {
  bool relevant = false;
  bool minimal = false;
  Rational epsilon;
};

struct InfeasibleSeed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetExhausted : std::runtime_error {
  BudgetExhausted(int searched, int fallback)
      : std::runtime_error("no qualifying set of size <= " + std::to_string(searched) +
                           "; the full feature set (size " + std::to_string(fallback) + ") always qualifies"),
        searched_up_to(searched),
        feasible_upper_bound(fallback) {}
  int searched_up_to;
  int feasible_upper_bound;
};

// One state of the minimum-cardinality search: per-feature in/out decisions
// plus the derived per-path kill flags (a path is killed once some chosen
// feature is inconsistent with it) and the error lower bound used to prune.
struct SearchNode {
  Bitset chosen;
  Bitset excluded;
  std::vector<char> path_killed;
  Rational bound_error;
};

// Deletion-based subset-minimal relevant set (threshold on the joint error).
// Walks the seed once in the requested order, dropping a feature whenever the
// candidate error stays within delta. Monotonicity makes the result
// subset-minimal for the chosen candidate measure.
Explanation min_relevant_set(const TreeModel& model, const std::vector<Path>& paths, const Instance& inst,
                             const Rational& delta, const Ordering& order = Ordering::ascending(),
                             const std::optional<Bitset>& seed = std::nullopt,
                             CandidateCheck check = CandidateCheck::exact);

// Complete iterative-deepening branch and bound for the smallest subset with
// conditional precision >= delta. Every candidate is verified by the exact
// measure engine; pruning uses the monotone error relaxation only.
Explanation min_cardinality_relevant_set(const TreeModel& model, const std::vector<Path>& paths, const Instance& inst,
                                         const Rational& delta, std::optional<int> budget = std::nullopt);

RelevanceCheck check_relevant_set(const std::vector<Path>& paths, const Instance& inst, const Rational& delta,
                                  const Bitset& subset, const FeatureSpace& space);

}  // namespace relset
