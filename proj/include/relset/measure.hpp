#pragma once

#include <utility>
#include <vector>

#include "relset/model.hpp"

namespace relset {

// Exact measures over the feature-space distribution induced by the per-value
// weights. A subset S of features is a Bitset over 0..m-1.
struct MeasureReport {
  Bitset subset;
  Rational epsilon;    // Pr(class(x) != c and x_S = v_S)
  Rational fix_prob;   // Pr(x_S = v_S)
  Rational precision;  // Pr(class(x) = c | x_S = v_S)
  std::vector<std::pair<int, Rational>> per_path;  // (path index, conditioned mass)
};

// Probability mass of the feature-space region consistent with the path.
Rational path_probability(const Path& path, const FeatureSpace& space);

// Mass of {x consistent with path, x_S = v_S}.
Rational conditioned_probability(const Path& path, const Instance& inst, const Bitset& subset, const FeatureSpace& space);

// Joint error mass: sum of conditioned masses over paths of a different class.
Rational error_mass(const std::vector<Path>& paths, const Instance& inst, const Bitset& subset, const FeatureSpace& space);

Rational fix_probability(const Instance& inst, const Bitset& subset, const FeatureSpace& space);

// Conditional precision; the denominator is the sum of conditioned masses over
// all paths, which equals fix_probability because paths partition the space.
Rational precision(const std::vector<Path>& paths, const Instance& inst, const Bitset& subset, const FeatureSpace& space);

MeasureReport measure_report(const std::vector<Path>& paths, const Instance& inst, const Bitset& subset,
                             const FeatureSpace& space);

}  // namespace relset
