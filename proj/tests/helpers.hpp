#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "relset/explain.hpp"
#include "relset/measure.hpp"
#include "relset/model.hpp"

namespace testutil {

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(RELSET_TEST_DATA) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline relset::TreeModel load_model(const std::string& name, bool semantic = true) {
  return relset::parse_document(read_fixture(name), semantic);
}

inline const relset::TreeModel& fig1() {
  static relset::TreeModel model = load_model("fig1.json");
  return model;
}

inline const std::vector<relset::Path>& fig1_paths() {
  static std::vector<relset::Path> paths = relset::enumerate_paths(fig1());
  return paths;
}

// The running-example instance v = (1,1,1,1,0,0,0,0,1), predicted class 1.
inline const relset::Instance& fig1_instance() {
  static relset::Instance inst = relset::make_instance(fig1(), {1, 1, 1, 1, 0, 0, 0, 0, 1});
  return inst;
}

inline relset::Bitset ids(int m, std::initializer_list<int> feature_ids) {
  relset::Bitset b(m);
  for (int id : feature_ids) b.set(id - 1);
  return b;
}

inline relset::Rational rat(const char* text) { return relset::Rational::parse(text); }

// Path lookup by leaf node id, which is how the running example names paths.
inline const relset::Path& path_to_leaf(const relset::TreeModel& model, const std::vector<relset::Path>& paths,
                                        const std::string& leaf_id) {
  for (const auto& p : paths)
    if (model.tree.nodes[p.nodes.back()].id.text == leaf_id) return p;
  REQUIRE(false);
  return paths.front();
}

}  // namespace testutil
