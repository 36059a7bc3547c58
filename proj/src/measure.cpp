#include "relset/measure.hpp"

namespace relset {

Rational path_probability(const Path& path, const FeatureSpace& space) {
  Rational prob(1);
  for (const auto& [f, allowed] : path.tested) prob *= space.features[f].set_weight(allowed);
  return prob;
}

Rational conditioned_probability(const Path& path, const Instance& inst, const Bitset& subset, const FeatureSpace& space) {
  Rational prob(1);
  for (const auto& [f, allowed] : path.tested) {
    if (subset.test(f)) {
      if (!allowed.test(inst.values[f])) return Rational(0);
      prob *= space.features[f].weights[inst.values[f]];
    } else {
      prob *= space.features[f].set_weight(allowed);
    }
  }
  subset.for_each([&](int f) {
    if (!path.tested_mask.test(f)) prob *= space.features[f].weights[inst.values[f]];
  });
  return prob;
}

Rational error_mass(const std::vector<Path>& paths, const Instance& inst, const Bitset& subset, const FeatureSpace& space) {
  Rational total;
  for (const auto& p : paths)
    if (p.class_index != inst.class_index) total += conditioned_probability(p, inst, subset, space);
  return total;
}

Rational fix_probability(const Instance& inst, const Bitset& subset, const FeatureSpace& space) {
  Rational prob(1);
  subset.for_each([&](int f) { prob *= space.features[f].weights[inst.values[f]]; });
  return prob;
}

Rational precision(const std::vector<Path>& paths, const Instance& inst, const Bitset& subset, const FeatureSpace& space) {
  Rational agree, total;
  for (const auto& p : paths) {
    Rational mass = conditioned_probability(p, inst, subset, space);
    if (p.class_index == inst.class_index) agree += mass;
    total += mass;
  }
  return agree / total;  // total > 0: the instance itself lies in the slice
}

MeasureReport measure_report(const std::vector<Path>& paths, const Instance& inst, const Bitset& subset,
                             const FeatureSpace& space) {
  MeasureReport r;
  r.subset = subset;
  r.fix_prob = fix_probability(inst, subset, space);
  Rational agree, total;
  for (size_t i = 0; i < paths.size(); ++i) {
    Rational mass = conditioned_probability(paths[i], inst, subset, space);
    if (paths[i].class_index == inst.class_index)
      agree += mass;
    else
      r.epsilon += mass;
    total += mass;
    r.per_path.emplace_back(static_cast<int>(i), std::move(mass));
  }
  r.precision = agree / total;
  return r;
}

}  // namespace relset
