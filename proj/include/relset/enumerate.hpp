#pragma once

#include <optional>
#include <vector>

#include "relset/explain.hpp"
#include "relset/model.hpp"

namespace relset {

// Enumerates both minimal families for the monotone relevance predicate
// C(S) = [error(S) <= delta] and its dual D(T) = !C(F \ T): minimal relevant
// sets on one side, minimal freeable ("contrastive") sets on the other.
//
// The exploration map is the pair of found families themselves: supersets of
// a found relevant set are known-relevant, and any set missing a found dual
// is known-irrelevant. A deterministic prefer-include backtracking search
// produces unexplored points until none remain, at which point both families
// are complete (that is exactly the hitting-set duality).
class DualitySession {
public:
  DualitySession(const TreeModel& model, const std::vector<Path>& paths, const Instance& inst, const Rational& delta);

  // Runs to completion or until a family reaches its cap.
  void run(std::optional<int> limit_relevant = std::nullopt, std::optional<int> limit_dual = std::nullopt);

  const std::vector<Bitset>& minimal_relevant() const { return cmin_; }
  const std::vector<Bitset>& minimal_dual() const { return dmin_; }
  bool truncated() const { return truncated_; }

private:
  bool relevant(const Bitset& subset) const;
  bool dual(const Bitset& freed) const;
  std::optional<Bitset> find_unexplored() const;
  Bitset shrink_relevant(Bitset subset) const;
  Bitset shrink_dual(Bitset freed) const;

  const TreeModel& model_;
  const std::vector<Path>& paths_;
  const Instance& inst_;
  Rational delta_;
  int m_;
  std::vector<Bitset> cmin_, dmin_;
  bool truncated_ = false;
};

// All subset-minimal S with error(S) <= delta (or the first `limit`), each
// verified minimal; discovery order is deterministic.
std::vector<Explanation> enumerate_min_relevant(const TreeModel& model, const std::vector<Path>& paths,
                                                const Instance& inst, const Rational& delta,
                                                std::optional<int> limit = std::nullopt, bool* truncated = nullptr);

std::vector<std::vector<int>> enumerate_min_duals(const TreeModel& model, const std::vector<Path>& paths,
                                                  const Instance& inst, const Rational& delta,
                                                  std::optional<int> limit = std::nullopt, bool* truncated = nullptr);

struct DualityViolation {
  std::string side;      // which family the offending set belongs (or is missing) to
  std::vector<int> set;  // 1-based feature ids
  std::string reason;
};

// Checks C_min == MHS(D_min) and D_min == MHS(C_min) with an exhaustive
// hitting-set scan, independent of the session. Requires complete families.
std::optional<DualityViolation> verify_duality(const std::vector<std::vector<int>>& cmin,
                                               const std::vector<std::vector<int>>& dmin, int feature_count);

// Exhaustive minimal hitting sets of a family over features 1..m, in
// canonical (size, lexicographic) order. MHS of the empty family is {{}}.
std::vector<std::vector<int>> minimal_hitting_sets(const std::vector<std::vector<int>>& family, int feature_count);

}  // namespace relset
