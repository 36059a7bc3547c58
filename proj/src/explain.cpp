#include "relset/explain.hpp"

#include <algorithm>

namespace relset {

namespace {

// Per-path factored slice mass under a shrinking fixed set S. Keeping the
// product of non-zero factors separate from the count of zero factors lets a
// one-feature removal be priced in O(1) rational operations per path.
class SliceMassEngine {
public:
  SliceMassEngine(const std::vector<Path>& paths, const Instance& inst, const FeatureSpace& space, const Bitset& seed,
                  CandidateCheck check)
      : paths_(paths), inst_(inst), space_(space), check_(check) {
    prod_.reserve(paths.size());
    zeros_.assign(paths.size(), 0);
    for (size_t p = 0; p < paths.size(); ++p) {
      Rational prod(1);
      if (check_ == CandidateCheck::paths) {
        for (const auto& [f, allowed] : paths[p].tested) {
          prod *= space_.features[f].set_weight(allowed);
          if (seed.test(f) && !allowed.test(inst.values[f])) ++zeros_[p];
        }
      } else {
        for (const auto& [f, allowed] : paths[p].tested) {
          if (seed.test(f)) {
            if (allowed.test(inst.values[f]))
              prod *= space_.features[f].weights[inst.values[f]];
            else
              ++zeros_[p];
          } else {
            prod *= space_.features[f].set_weight(allowed);
          }
        }
        seed.for_each([&](int f) {
          if (!paths[p].tested_mask.test(f)) prod *= space_.features[f].weights[inst.values[f]];
        });
      }
      prod_.push_back(std::move(prod));
    }
  }

  // Error of S \ {f} over wrong-class paths, without committing the removal.
  Rational probe_remove(int f) const {
    Rational total;
    for (size_t p = 0; p < paths_.size(); ++p) {
      if (paths_[p].class_index == inst_.class_index) continue;
      auto [dz, factor_old, factor_new] = removal_effect(p, f);
      if (zeros_[p] - dz != 0) continue;
      Rational mass = prod_[p];
      if (!factor_old.is_zero()) mass /= factor_old;
      mass *= factor_new;
      total += mass;
    }
    return total;
  }

  void commit_remove(int f) {
    for (size_t p = 0; p < paths_.size(); ++p) {
      auto [dz, factor_old, factor_new] = removal_effect(p, f);
      zeros_[p] -= dz;
      if (!factor_old.is_zero()) prod_[p] /= factor_old;
      prod_[p] *= factor_new;
    }
  }

private:
  // (zero-count delta, factor while f in S, factor once f leaves S).
  // Zero factors are never folded into prod_, hence factor_old = 0 marks them.
  std::tuple<int, Rational, Rational> removal_effect(size_t p, int f) const {
    const Bitset* allowed = paths_[p].allowed_for(f);
    if (check_ == CandidateCheck::paths) {
      if (allowed && !allowed->test(inst_.values[f])) return {1, Rational(1), Rational(1)};
      return {0, Rational(1), Rational(1)};
    }
    if (!allowed) return {0, space_.features[f].weights[inst_.values[f]], Rational(1)};
    if (!allowed->test(inst_.values[f])) return {1, Rational(0), space_.features[f].set_weight(*allowed)};
    return {0, space_.features[f].weights[inst_.values[f]], space_.features[f].set_weight(*allowed)};
  }

  const std::vector<Path>& paths_;
  const Instance& inst_;
  const FeatureSpace& space_;
  CandidateCheck check_;
  std::vector<Rational> prod_;
  std::vector<int> zeros_;
};

std::vector<int> deletion_order(const Ordering& order, const Bitset& seed) {
  std::vector<int> result;
  Bitset pending = seed;
  if (order.kind == Ordering::Kind::given) {
    for (int id : order.features) {
      if (id >= 1 && id <= seed.universe() && pending.test(id - 1)) {
        result.push_back(id - 1);
        pending.reset(id - 1);
      }
    }
  }
  pending.for_each([&](int f) { result.push_back(f); });
  return result;
}

}  // namespace

Explanation min_relevant_set(const TreeModel& model, const std::vector<Path>& paths, const Instance& inst,
                             const Rational& delta, const Ordering& order, const std::optional<Bitset>& seed_opt,
                             CandidateCheck check) {
  const int m = model.space.size();
  Bitset current = seed_opt.value_or(Bitset(m, true));
  const int seed_size = current.count();

  if (seed_opt) {
    Rational seed_error = error_mass(paths, inst, current, model.space);
    if (seed_error > delta)
      throw InfeasibleSeed("seed has error " + seed_error.ratio_string() + " > delta " + delta.ratio_string());
  }

  SliceMassEngine engine(paths, inst, model.space, current, check);

  Explanation out;
  out.delta = delta;
  out.kind = ExplanationKind::subset_minimal;

  if (order.kind == Ordering::Kind::greedy) {
    Bitset pending = current;
    for (int step = 0; step < seed_size; ++step) {
      int best = -1;
      Rational best_error;
      pending.for_each([&](int f) {
        Rational e = engine.probe_remove(f);
        if (best < 0 || e < best_error) {
          best = f;
          best_error = e;
        }
      });
      pending.reset(best);
      bool drop = best_error <= delta;
      if (drop) {
        engine.commit_remove(best);
        current.reset(best);
      }
      out.trace.push_back({best + 1, best_error, !drop});
    }
  } else {
    for (int f : deletion_order(order, current)) {
      Rational e = engine.probe_remove(f);
      bool drop = e <= delta;
      if (drop) {
        engine.commit_remove(f);
        current.reset(f);
      }
      out.trace.push_back({f + 1, e, !drop});
    }
  }

  out.subset = current.to_ids();
  out.epsilon = error_mass(paths, inst, current, model.space);
  out.precision = precision(paths, inst, current, model.space);
  return out;
}

RelevanceCheck check_relevant_set(const std::vector<Path>& paths, const Instance& inst, const Rational& delta,
                                  const Bitset& subset, const FeatureSpace& space) {
  RelevanceCheck r;
  r.epsilon = error_mass(paths, inst, subset, space);
  r.relevant = r.epsilon <= delta;
  if (r.relevant) {
    r.minimal = true;
    subset.for_each([&](int f) {
      if (r.minimal && !(error_mass(paths, inst, subset.without(f), space) > delta)) r.minimal = false;
    });
  }
  return r;
}

namespace {

struct MinCardSearch {
  const TreeModel& model;
  const std::vector<Path>& paths;
  const Instance& inst;
  Rational one_minus_delta;
  int m;
  int k = 0;

  bool qualifies(const SearchNode& node) const {
    // precision >= delta  <=>  error <= (1 - delta) * fix_prob, exact.
    // Killed paths carry no slice mass, skip them.
    Rational err;
    for (size_t p = 0; p < paths.size(); ++p) {
      if (node.path_killed[p] || paths[p].class_index == inst.class_index) continue;
      err += conditioned_probability(paths[p], inst, node.chosen, model.space);
    }
    return err <= one_minus_delta * fix_probability(inst, node.chosen, model.space);
  }

  // Largest fix probability any size-k superset of `chosen` inside the
  // not-excluded region can have: take the heaviest undecided values.
  Rational max_fix(const SearchNode& node, int next) const {
    Rational fix = fix_probability(inst, node.chosen, model.space);
    std::vector<Rational> undecided;
    for (int f = next; f < m; ++f)
      if (!node.excluded.test(f)) undecided.push_back(model.space.features[f].weights[inst.values[f]]);
    std::sort(undecided.begin(), undecided.end(), [](const Rational& a, const Rational& b) { return b < a; });
    int slots = k - node.chosen.count();
    for (int i = 0; i < slots && i < static_cast<int>(undecided.size()); ++i) fix *= undecided[i];
    return fix;
  }

  std::optional<Bitset> dfs(SearchNode& node, int next) {
    int chosen_count = node.chosen.count();
    if (chosen_count == k) return qualifies(node) ? std::optional<Bitset>(node.chosen) : std::nullopt;
    if (chosen_count + (m - next) < k) return std::nullopt;

    // Include branch first: deterministic, finds the lexicographically
    // smallest qualifying set at this depth.
    node.chosen.set(next);
    for (size_t p = 0; p < paths.size(); ++p) {
      const Bitset* allowed = paths[p].allowed_for(next);
      if (allowed && !allowed->test(inst.values[next])) ++node.path_killed[p];
    }
    if (auto found = dfs(node, next + 1)) return found;
    for (size_t p = 0; p < paths.size(); ++p) {
      const Bitset* allowed = paths[p].allowed_for(next);
      if (allowed && !allowed->test(inst.values[next])) --node.path_killed[p];
    }
    node.chosen.reset(next);

    node.excluded.set(next);
    // Even taking every still-undecided feature cannot push the error below
    // what a qualifying size-k set would need: prune.
    Bitset widest = node.excluded.complement();
    node.bound_error = error_mass(paths, inst, widest, model.space);
    if (node.bound_error <= one_minus_delta * max_fix(node, next + 1)) {
      if (auto found = dfs(node, next + 1)) {
        node.excluded.reset(next);
        return found;
      }
    }
    node.excluded.reset(next);
    return std::nullopt;
  }
};

}  // namespace

Explanation min_cardinality_relevant_set(const TreeModel& model, const std::vector<Path>& paths, const Instance& inst,
                                         const Rational& delta, std::optional<int> budget) {
  const int m = model.space.size();
  const int max_k = std::min(budget.value_or(m), m);
  MinCardSearch search{model, paths, inst, Rational(1) - delta, m};

  for (int k = 0; k <= max_k; ++k) {
    search.k = k;
    SearchNode node{Bitset(m), Bitset(m), std::vector<char>(paths.size(), 0), Rational()};
    if (auto found = search.dfs(node, 0)) {
      Explanation out;
      out.kind = ExplanationKind::min_cardinality;
      out.delta = delta;
      out.subset = found->to_ids();
      out.epsilon = error_mass(paths, inst, *found, model.space);
      out.precision = precision(paths, inst, *found, model.space);
      return out;
    }
  }
  throw BudgetExhausted(max_k, m);
}

}  // namespace relset
