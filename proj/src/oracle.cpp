#include "relset/oracle.hpp"

#include <algorithm>
#include <deque>

#include "relset/bitset.hpp"

namespace relset {

namespace {

uint64_t space_size(const FeatureSpace& space) {
  uint64_t total = 1;
  for (const auto& f : space.features) {
    total *= f.domain.size();
    if (total > (uint64_t(1) << 40)) return total;  // saturates; only compared against caps
  }
  return total;
}

// Visits every point of the feature space with its exact weight.
template <typename Fn>
void for_each_point(const TreeModel& model, Fn fn) {
  const int m = model.space.size();
  std::vector<int> point(m, 0);
  auto rec = [&](auto&& self, int f, Rational weight) -> void {
    if (f == m) {
      fn(point, weight);
      return;
    }
    const auto& spec = model.space.features[f];
    for (size_t v = 0; v < spec.domain.size(); ++v) {
      point[f] = static_cast<int>(v);
      self(self, f + 1, weight * spec.weights[v]);
    }
  };
  rec(rec, 0, Rational(1));
}

}  // namespace

BruteReport brute_measures(const TreeModel& model, const Instance& inst, const Bitset& subset, uint64_t point_cap) {
  if (space_size(model.space) > point_cap)
    throw OracleCapExceeded("feature space exceeds the oracle enumeration cap");
  BruteReport r;
  r.subset = subset;
  Rational agree;
  for_each_point(model, [&](const std::vector<int>& point, const Rational& weight) {
    ++r.points_examined;
    bool in_slice = true;
    subset.for_each([&](int f) { in_slice = in_slice && point[f] == inst.values[f]; });
    if (!in_slice) return;
    r.fix_prob += weight;
    if (classify(model, point) == inst.class_index)
      agree += weight;
    else
      r.epsilon += weight;
  });
  r.precision = agree / r.fix_prob;
  return r;
}

namespace {

// error(S) for every S at once: one point sweep bins wrong-class mass by the
// agreement mask {i : x_i = v_i}, then a superset-sum transform accumulates
// error(S) = sum of mass over masks containing S.
std::vector<Rational> error_by_subset(const TreeModel& model, const Instance& inst, uint64_t point_cap) {
  const int m = model.space.size();
  if (m > 12) throw OracleCapExceeded("brute subset enumeration requires at most 12 features");
  if (space_size(model.space) > point_cap)
    throw OracleCapExceeded("feature space exceeds the oracle enumeration cap");

  std::vector<Rational> mass(size_t(1) << m);
  for_each_point(model, [&](const std::vector<int>& point, const Rational& weight) {
    if (classify(model, point) == inst.class_index) return;
    uint32_t agree = 0;
    for (int f = 0; f < m; ++f)
      if (point[f] == inst.values[f]) agree |= 1u << f;
    mass[agree] += weight;
  });
  for (int f = 0; f < m; ++f)
    for (uint32_t s = 0; s < (1u << m); ++s)
      if (!(s & (1u << f))) mass[s] += mass[s | (1u << f)];
  return mass;
}

std::vector<std::vector<int>> minimal_true_sets(const std::vector<char>& truth, int m) {
  std::vector<std::vector<uint32_t>> by_size(m + 1);
  for (uint32_t s = 0; s < (1u << m); ++s) by_size[__builtin_popcount(s)].push_back(s);
  std::vector<std::vector<int>> out;
  for (int size = 0; size <= m; ++size) {
    for (uint32_t s : by_size[size]) {
      if (!truth[s]) continue;
      bool minimal = true;
      for (int f = 0; f < m && minimal; ++f)
        if ((s & (1u << f)) && truth[s & ~(1u << f)]) minimal = false;
      if (!minimal) continue;
      std::vector<int> ids;
      for (int f = 0; f < m; ++f)
        if (s & (1u << f)) ids.push_back(f + 1);
      out.push_back(std::move(ids));
    }
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> brute_minimal_relevant(const TreeModel& model, const Instance& inst, const Rational& delta,
                                                     uint64_t point_cap) {
  const int m = model.space.size();
  auto errors = error_by_subset(model, inst, point_cap);
  std::vector<char> truth(errors.size());
  for (size_t s = 0; s < errors.size(); ++s) truth[s] = errors[s] <= delta;
  return minimal_true_sets(truth, m);
}

std::vector<std::vector<int>> brute_minimal_duals(const TreeModel& model, const Instance& inst, const Rational& delta,
                                                  uint64_t point_cap) {
  const int m = model.space.size();
  auto errors = error_by_subset(model, inst, point_cap);
  const uint32_t full = (1u << m) - 1;
  std::vector<char> truth(errors.size());
  for (uint32_t t = 0; t <= full; ++t) truth[t] = errors[full & ~t] > delta;
  return minimal_true_sets(truth, m);
}

std::vector<std::vector<int>> mhs_by_branching(const std::vector<std::vector<int>>& family, int feature_count) {
  if (family.empty()) return {{}};
  std::vector<Bitset> fam;
  for (const auto& ids : family) fam.push_back(Bitset::from_ids(feature_count, ids));

  std::vector<Bitset> found;
  Bitset current(feature_count);
  auto first_unhit = [&]() -> const Bitset* {
    for (const auto& member : fam)
      if (!current.intersects(member)) return &member;
    return nullptr;
  };
  auto rec = [&](auto&& self) -> void {
    const Bitset* unhit = first_unhit();
    if (!unhit) {
      found.push_back(current);
      return;
    }
    unhit->for_each([&](int f) {
      current.set(f);
      self(self);
      current.reset(f);
    });
  };
  rec(rec);

  // The branching can emit duplicates and non-minimal sets; filter both.
  std::sort(found.begin(), found.end(), Bitset::canonical_less);
  found.erase(std::unique(found.begin(), found.end()), found.end());
  std::vector<Bitset> minimal;
  for (const auto& h : found) {
    bool keep = true;
    for (const auto& kept : minimal)
      if (kept.is_subset_of(h)) {
        keep = false;
        break;
      }
    if (keep) minimal.push_back(h);
  }
  std::vector<std::vector<int>> out;
  for (const auto& h : minimal) out.push_back(h.to_ids());
  return out;
}

namespace {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(uint64_t seed) : gen(seed) {}
  int below(int n) { return static_cast<int>(gen() % static_cast<uint64_t>(n)); }
  bool percent(int p) { return below(100) < p; }
};

struct Builder {
  const TreeGenParams& params;
  Rng rng;
  TreeModel model;
  int next_id = 1;

  int add_node(bool leaf, int feature, int class_index) {
    TreeNode n;
    n.id = {std::to_string(next_id++), true};
    n.leaf = leaf;
    n.feature = feature;
    n.class_index = class_index;
    model.tree.nodes.push_back(std::move(n));
    return static_cast<int>(model.tree.nodes.size()) - 1;
  }

  int pick_class() { return rng.percent(params.class_skew_percent) ? 0 : rng.below(params.class_count); }

  // Splits the reachable values of a feature into 2..3 nonempty groups.
  std::vector<Bitset> split_values(const Bitset& avail, int domain) {
    std::vector<int> values;
    avail.for_each([&](int v) { values.push_back(v); });
    for (size_t i = values.size(); i > 1; --i) std::swap(values[i - 1], values[rng.below(static_cast<int>(i))]);
    int groups = values.size() >= 3 && rng.percent(30) ? 3 : 2;
    std::vector<Bitset> parts(groups, Bitset(domain));
    for (size_t i = 0; i < values.size(); ++i)
      parts[i < static_cast<size_t>(groups) ? i : static_cast<size_t>(rng.below(groups))].set(values[i]);
    return parts;
  }
};

}  // namespace

TreeModel generate_tree(const TreeGenParams& params) {
  Builder b{params, Rng(params.seed), {}, 1};

  for (int i = 0; i < params.feature_count; ++i) {
    FeatureSpec spec;
    spec.id = i + 1;
    spec.name = "x" + std::to_string(i + 1);
    int domain = params.min_domain + (params.max_domain > params.min_domain
                                          ? b.rng.below(params.max_domain - params.min_domain + 1)
                                          : 0);
    for (int v = 0; v < domain; ++v) spec.domain.push_back({std::to_string(v), true});
    if (params.weighted) {
      spec.explicit_weights = true;
      std::vector<int> raw(domain);
      int total = 0;
      for (int v = 0; v < domain; ++v) total += raw[v] = 1 + b.rng.below(9);
      for (int v = 0; v < domain; ++v) spec.weights.emplace_back(raw[v], total);
    } else {
      spec.weights.assign(domain, Rational(1, domain));
    }
    b.model.space.features.push_back(std::move(spec));
  }
  for (int c = 0; c < params.class_count; ++c) b.model.tree.classes.push_back({std::to_string(c), true});

  struct Open {
    int index;
    std::vector<Bitset> avail;
    int depth;
  };

  std::vector<Bitset> root_avail;
  for (const auto& f : b.model.space.features) root_avail.emplace_back(static_cast<int>(f.domain.size()), true);

  auto splittable = [&](const std::vector<Bitset>& avail) {
    std::vector<int> fs;
    for (int f = 0; f < params.feature_count; ++f)
      if (avail[f].count() >= 2) fs.push_back(f);
    return fs;
  };

  auto expand = [&](std::deque<Open>& queue, const Open& open, bool as_leaf) {
    TreeNode& node = b.model.tree.nodes[open.index];
    auto candidates = splittable(open.avail);
    if (as_leaf || candidates.empty()) {
      node.leaf = true;
      node.class_index = b.pick_class();
      return;
    }
    int f = candidates[b.rng.below(static_cast<int>(candidates.size()))];
    node.feature = f;
    for (auto& part : b.split_values(open.avail[f], open.avail[f].universe())) {
      int child = b.add_node(false, 0, -1);
      b.model.tree.nodes[open.index].children.push_back({child, part});
      auto child_avail = open.avail;
      child_avail[f] = part;
      queue.push_back({child, std::move(child_avail), open.depth + 1});
    }
  };

  std::deque<Open> queue;
  int root = b.add_node(false, 0, -1);
  b.model.tree.root = root;
  queue.push_back({root, root_avail, 0});

  if (params.target_nodes > 0) {
    // Breadth-first growth to a node budget; remaining open nodes close as leaves.
    while (!queue.empty()) {
      Open open = std::move(queue.front());
      queue.pop_front();
      bool budget_left = static_cast<int>(b.model.tree.nodes.size()) < params.target_nodes;
      expand(queue, open, !budget_left);
    }
  } else {
    while (!queue.empty()) {
      Open open = std::move(queue.back());
      queue.pop_back();
      bool stop = open.depth >= params.max_depth || (open.depth > 0 && b.rng.percent(params.leaf_bias_percent));
      expand(queue, open, stop);
    }
  }
  return b.model;
}

std::vector<int> random_point(const TreeModel& model, std::mt19937_64& rng) {
  std::vector<int> point;
  for (const auto& f : model.space.features)
    point.push_back(static_cast<int>(rng() % static_cast<uint64_t>(f.domain.size())));
  return point;
}

Bitset random_subset(int feature_count, std::mt19937_64& rng) {
  Bitset subset(feature_count);
  for (int f = 0; f < feature_count; ++f)
    if (rng() & 1) subset.set(f);
  return subset;
}

}  // namespace relset
