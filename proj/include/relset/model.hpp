#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relset/bitset.hpp"
#include "relset/rational.hpp"

namespace relset {

// A domain value, class label or node id as it appeared in the document;
// `numeric` distinguishes JSON 7 from JSON "7" so documents round-trip.
struct Token {
  std::string text;
  bool numeric = false;
  friend bool operator==(const Token&, const Token&) = default;
};

struct FeatureSpec {
  int id = 0;  // 1..m, dense
  std::string name;
  std::vector<Token> domain;       // >= 2 distinct values
  std::vector<Rational> weights;   // one per value; uniform when not explicit
  bool explicit_weights = false;

  int value_index(std::string_view token) const;  // -1 when absent
  Rational set_weight(const Bitset& values) const;
  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

struct FeatureSpace {
  std::vector<FeatureSpec> features;  // index i holds feature id i+1
  int size() const { return static_cast<int>(features.size()); }
  friend bool operator==(const FeatureSpace&, const FeatureSpace&) = default;
};

struct TreeEdge {
  int target = -1;  // dense node index
  Bitset allowed;   // nonempty subset of the parent feature's domain
  friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

struct TreeNode {
  Token id;
  bool leaf = false;
  int feature = 0;       // feature index (0-based) for internal nodes
  int class_index = -1;  // index into classes for leaves
  std::vector<TreeEdge> children;  // document order; defines path order
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  int root = -1;
  std::vector<Token> classes;
  // Structural identity keyed by node id; storage order is a parse artifact.
  friend bool operator==(const DecisionTree& a, const DecisionTree& b);
};

struct TreeModel {
  FeatureSpace space;
  DecisionTree tree;
  friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

// One root-to-leaf branch. `tested` lists the features restricted along the
// branch with their cumulative allowed sets (intersection of all literals on
// that feature); untested features implicitly keep the full domain.
struct Path {
  std::vector<int> nodes;  // dense node indexes, root first
  int class_index = -1;
  std::vector<std::pair<int, Bitset>> tested;  // (feature index, allowed), ascending
  Bitset tested_mask;

  const Bitset* allowed_for(int feature) const {
    for (const auto& [f, set] : tested)
      if (f == feature) return &set;
    return nullptr;
  }
};

struct Instance {
  std::vector<int> values;  // value index per feature
  int class_index = -1;     // always classify(v)
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  explicit ValidationError(std::vector<std::string> diags);
  std::vector<std::string> diagnostics;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses and validates a JSON tree document. With `semantic_checks` off only
// structural integrity is enforced (references, domains, acyclicity); the
// semantic invariants (edge partitions, weight sums) are left to callers that
// want to diagnose broken trees instead of rejecting them.
TreeModel parse_document(const std::string& text, bool semantic_checks = true);
std::string serialize_document(const TreeModel& model);

// Every violated invariant, one human-readable line each, naming the node.
std::vector<std::string> validate_tree(const DecisionTree& tree, const FeatureSpace& space);

int classify(const TreeModel& model, const std::vector<int>& point);
std::vector<int> parse_point(const TreeModel& model, const std::vector<std::string>& tokens);
Instance make_instance(const TreeModel& model, const std::vector<int>& point);

// Depth-first, children in document order.
std::vector<Path> enumerate_paths(const TreeModel& model);

std::string describe_point(const TreeModel& model, const std::vector<int>& point);

}  // namespace relset
