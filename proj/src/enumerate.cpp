#include "relset/enumerate.hpp"

#include <algorithm>

namespace relset {

DualitySession::DualitySession(const TreeModel& model, const std::vector<Path>& paths, const Instance& inst,
                               const Rational& delta)
    : model_(model), paths_(paths), inst_(inst), delta_(delta), m_(model.space.size()) {}

bool DualitySession::relevant(const Bitset& subset) const {
  return error_mass(paths_, inst_, subset, model_.space) <= delta_;
}

bool DualitySession::dual(const Bitset& freed) const { return !relevant(freed.complement()); }

// Deterministic backtracking for a subset whose status is not yet covered by
// the map: it must miss an element of every found relevant set and hit every
// found dual. Prefer-include, so the first hit is the largest such point.
std::optional<Bitset> DualitySession::find_unexplored() const {
  Bitset point(m_);
  // Features < decided are fixed in `point`; the rest are free. A branch is
  // dead once some found relevant set can no longer be broken or some found
  // dual can no longer be hit. At decided == m the check is exact.
  auto feasible = [&](int decided) {
    for (const auto& M : cmin_) {
      bool ok = false;
      M.for_each([&](int f) { ok = ok || f >= decided || !point.test(f); });
      if (!ok) return false;
    }
    for (const auto& T : dmin_) {
      bool ok = false;
      T.for_each([&](int f) { ok = ok || f >= decided || point.test(f); });
      if (!ok) return false;
    }
    return true;
  };

  auto dfs = [&](auto&& self, int f) -> bool {
    if (!feasible(f)) return false;
    if (f == m_) return true;
    point.set(f);
    if (self(self, f + 1)) return true;
    point.reset(f);
    return self(self, f + 1);
  };
  if (dfs(dfs, 0)) return point;
  return std::nullopt;
}

Bitset DualitySession::shrink_relevant(Bitset subset) const {
  for (int f = 0; f < m_; ++f)
    if (subset.test(f) && relevant(subset.without(f))) subset.reset(f);
  return subset;
}

Bitset DualitySession::shrink_dual(Bitset freed) const {
  for (int f = 0; f < m_; ++f)
    if (freed.test(f) && dual(freed.without(f))) freed.reset(f);
  return freed;
}

void DualitySession::run(std::optional<int> limit_relevant, std::optional<int> limit_dual) {
  while (true) {
    if (limit_relevant && static_cast<int>(cmin_.size()) >= *limit_relevant) {
      // The cap is only a truncation if something was left to discover.
      truncated_ = find_unexplored().has_value();
      return;
    }
    if (limit_dual && static_cast<int>(dmin_.size()) >= *limit_dual) {
      truncated_ = find_unexplored().has_value();
      return;
    }
    auto point = find_unexplored();
    if (!point) return;
    if (relevant(*point))
      cmin_.push_back(shrink_relevant(*point));
    else
      dmin_.push_back(shrink_dual(point->complement()));
  }
}

std::vector<Explanation> enumerate_min_relevant(const TreeModel& model, const std::vector<Path>& paths,
                                                const Instance& inst, const Rational& delta, std::optional<int> limit,
                                                bool* truncated) {
  DualitySession session(model, paths, inst, delta);
  session.run(limit, std::nullopt);
  if (truncated) *truncated = session.truncated();
  std::vector<Explanation> out;
  for (const auto& subset : session.minimal_relevant()) {
    Explanation e;
    e.kind = ExplanationKind::subset_minimal;
    e.delta = delta;
    e.subset = subset.to_ids();
    e.epsilon = error_mass(paths, inst, subset, model.space);
    e.precision = precision(paths, inst, subset, model.space);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::vector<int>> enumerate_min_duals(const TreeModel& model, const std::vector<Path>& paths,
                                                  const Instance& inst, const Rational& delta, std::optional<int> limit,
                                                  bool* truncated) {
  DualitySession session(model, paths, inst, delta);
  session.run(std::nullopt, limit);
  if (truncated) *truncated = session.truncated();
  std::vector<std::vector<int>> out;
  for (const auto& freed : session.minimal_dual()) out.push_back(freed.to_ids());
  return out;
}

namespace {

std::vector<Bitset> to_bitsets(const std::vector<std::vector<int>>& family, int m) {
  std::vector<Bitset> out;
  for (const auto& ids : family) out.push_back(Bitset::from_ids(m, ids));
  return out;
}

std::vector<Bitset> sorted_canonical(std::vector<Bitset> family) {
  std::sort(family.begin(), family.end(), Bitset::canonical_less);
  return family;
}

}  // namespace

std::vector<std::vector<int>> minimal_hitting_sets(const std::vector<std::vector<int>>& family, int feature_count) {
  std::vector<Bitset> fam = to_bitsets(family, feature_count);
  if (fam.empty()) return {{}};

  Bitset universe(feature_count);
  for (const auto& member : fam) universe |= member;
  std::vector<int> elems;
  universe.for_each([&](int f) { elems.push_back(f); });
  const int n = static_cast<int>(elems.size());

  // Scan all subsets of the union, smallest cardinality first; a hitting set
  // is minimal iff no kept set is contained in it.
  std::vector<std::vector<uint32_t>> by_size(n + 1);
  for (uint32_t mask = 0; mask < (1u << n); ++mask) by_size[__builtin_popcount(mask)].push_back(mask);

  std::vector<Bitset> kept;
  for (int size = 0; size <= n; ++size) {
    for (uint32_t mask : by_size[size]) {
      Bitset candidate(feature_count);
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) candidate.set(elems[i]);
      bool hits = true;
      for (const auto& member : fam)
        if (!candidate.intersects(member)) {
          hits = false;
          break;
        }
      if (!hits) continue;
      bool minimal = true;
      for (const auto& prev : kept)
        if (prev.is_subset_of(candidate)) {
          minimal = false;
          break;
        }
      if (minimal) kept.push_back(candidate);
    }
  }

  std::vector<std::vector<int>> out;
  for (const auto& b : sorted_canonical(kept)) out.push_back(b.to_ids());
  return out;
}

std::optional<DualityViolation> verify_duality(const std::vector<std::vector<int>>& cmin,
                                               const std::vector<std::vector<int>>& dmin, int feature_count) {
  auto check_side = [&](const std::vector<std::vector<int>>& family, const std::vector<std::vector<int>>& other,
                        const char* side) -> std::optional<DualityViolation> {
    auto expected = sorted_canonical(to_bitsets(minimal_hitting_sets(other, feature_count), feature_count));
    auto actual = sorted_canonical(to_bitsets(family, feature_count));
    if (expected == actual) return std::nullopt;
    for (const auto& a : actual)
      if (std::find(expected.begin(), expected.end(), a) == expected.end())
        return DualityViolation{side, a.to_ids(), "not a minimal hitting set of the opposite family"};
    for (const auto& e : expected)
      if (std::find(actual.begin(), actual.end(), e) == actual.end())
        return DualityViolation{side, e.to_ids(), "minimal hitting set of the opposite family but missing"};
    return DualityViolation{side, {}, "families differ"};
  };
  if (auto v = check_side(cmin, dmin, "relevant")) return v;
  return check_side(dmin, cmin, "dual");
}

}  // namespace relset
