#include "relset/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace relset {

using nlohmann::json;

int FeatureSpec::value_index(std::string_view token) const {
  for (size_t i = 0; i < domain.size(); ++i)
    if (domain[i].text == token) return static_cast<int>(i);
  return -1;
}

Rational FeatureSpec::set_weight(const Bitset& values) const {
  Rational total;
  values.for_each([&](int v) { total += weights[v]; });
  return total;
}

bool operator==(const DecisionTree& a, const DecisionTree& b) {
  if (a.classes != b.classes || a.nodes.size() != b.nodes.size()) return false;
  if (a.root < 0 || b.root < 0) return a.root == b.root;
  if (!(a.nodes[a.root].id == b.nodes[b.root].id)) return false;
  std::map<std::string, const TreeNode*> by_id;
  for (const auto& n : b.nodes) by_id[n.id.text] = &n;
  for (const auto& n : a.nodes) {
    auto it = by_id.find(n.id.text);
    if (it == by_id.end()) return false;
    const TreeNode& o = *it->second;
    if (!(n.id == o.id) || n.leaf != o.leaf || n.class_index != o.class_index ||
        (!n.leaf && n.feature != o.feature) || n.children.size() != o.children.size())
      return false;
    for (size_t c = 0; c < n.children.size(); ++c) {
      if (!(a.nodes[n.children[c].target].id == b.nodes[o.children[c].target].id)) return false;
      if (!(n.children[c].allowed == o.children[c].allowed)) return false;
    }
  }
  return true;
}

ValidationError::ValidationError(std::vector<std::string> diags)
    : std::runtime_error(diags.empty() ? "validation failed" : "validation failed: " + diags.front()),
      diagnostics(std::move(diags)) {}

namespace {

Token token_from_json(const json& j, const char* what) {
  if (j.is_string()) return {j.get<std::string>(), false};
  if (j.is_number_integer()) return {std::to_string(j.get<long long>()), true};
  throw ParseError(std::string(what) + " must be a string or integer");
}

json token_to_json(const Token& t) {
  if (t.numeric) return json(std::stoll(t.text));
  return json(t.text);
}

FeatureSpace parse_features(const json& doc) {
  if (!doc.contains("features") || !doc["features"].is_array() || doc["features"].empty())
    throw ParseError("document needs a non-empty 'features' array");
  FeatureSpace space;
  for (const auto& jf : doc["features"]) {
    FeatureSpec spec;
    if (!jf.contains("id") || !jf["id"].is_number_integer()) throw ParseError("feature without integer 'id'");
    spec.id = jf["id"].get<int>();
    spec.name = jf.value("name", "x" + std::to_string(spec.id));
    if (!jf.contains("domain") || !jf["domain"].is_array()) throw ParseError("feature " + std::to_string(spec.id) + " has no 'domain' array");
    for (const auto& jv : jf["domain"]) spec.domain.push_back(token_from_json(jv, "domain value"));
    if (jf.contains("weights")) {
      spec.explicit_weights = true;
      for (const auto& jw : jf["weights"]) {
        if (!jw.is_string()) throw ParseError("weights must be exact strings like \"1/2\" or \"0.25\"");
        spec.weights.push_back(Rational::parse(jw.get<std::string>()));
      }
    } else {
      spec.weights.assign(spec.domain.size(), Rational(1, static_cast<long long>(spec.domain.size())));
    }
    space.features.push_back(std::move(spec));
  }
  std::sort(space.features.begin(), space.features.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (int i = 0; i < space.size(); ++i)
    if (space.features[i].id != i + 1)
      throw ParseError("feature ids must be exactly 1.." + std::to_string(space.size()) + " with no gaps");
  return space;
}

std::vector<std::string> validate_feature_space(const FeatureSpace& space) {
  std::vector<std::string> diags;
  for (const auto& f : space.features) {
    std::string who = "feature " + std::to_string(f.id) + " ('" + f.name + "')";
    if (f.domain.size() < 2) diags.push_back(who + ": domain needs at least 2 values");
    std::set<std::string> seen;
    for (const auto& v : f.domain)
      if (!seen.insert(v.text).second) diags.push_back(who + ": duplicate domain value '" + v.text + "'");
    if (f.weights.size() != f.domain.size()) {
      diags.push_back(who + ": weight count does not match domain size");
      continue;
    }
    Rational sum;
    bool positive = true;
    for (const auto& w : f.weights) {
      if (!(w > Rational(0))) positive = false;
      sum += w;
    }
    if (!positive) diags.push_back(who + ": weights must all be positive");
    if (sum != Rational(1)) diags.push_back(who + ": weights sum to " + sum.ratio_string() + ", expected 1/1");
  }
  return diags;
}

}  // namespace

std::vector<std::string> validate_tree(const DecisionTree& tree, const FeatureSpace& space) {
  std::vector<std::string> diags = validate_feature_space(space);
  if (tree.classes.size() < 2) diags.push_back("tree declares fewer than 2 classes");
  if (tree.nodes.empty() || tree.root < 0) {
    diags.push_back("tree has no root");
    return diags;
  }

  std::vector<int> incoming(tree.nodes.size(), 0);
  for (const auto& n : tree.nodes)
    for (const auto& e : n.children) ++incoming[e.target];
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    std::string who = "node '" + n.id.text + "'";
    if (static_cast<int>(i) == tree.root) {
      if (incoming[i] != 0) diags.push_back(who + ": root must have no incoming edge");
    } else if (incoming[i] != 1) {
      diags.push_back(who + ": expected exactly one incoming edge, found " + std::to_string(incoming[i]));
    }
    if (n.leaf && !n.children.empty()) diags.push_back(who + ": leaf with outgoing edges");
    if (!n.leaf && n.children.empty()) diags.push_back(who + ": internal node with no outgoing edges");
  }
  if (tree.nodes[tree.root].leaf) diags.push_back("node '" + tree.nodes[tree.root].id.text + "': root is a leaf (degenerate tree)");

  // Walk from the root tracking, per feature, the set of values that can
  // still reach each node; sibling literals must split that set exactly.
  std::vector<char> visited(tree.nodes.size(), 0);
  std::vector<Bitset> reaching;
  reaching.reserve(space.size());
  for (const auto& f : space.features) reaching.emplace_back(static_cast<int>(f.domain.size()), true);

  auto walk = [&](auto&& self, int idx, std::vector<Bitset>& reach) -> void {
    if (visited[idx]) return;  // incoming-edge diagnostics already cover re-entry
    visited[idx] = 1;
    const TreeNode& n = tree.nodes[idx];
    if (n.leaf || n.children.empty()) return;
    std::string who = "node '" + n.id.text + "'";
    const Bitset& avail = reach[n.feature];
    Bitset covered(avail.universe());
    bool overlap = false;
    for (const auto& e : n.children) {
      Bitset effective = e.allowed & avail;
      if (covered.intersects(effective)) overlap = true;
      covered |= effective;
    }
    if (overlap) diags.push_back(who + ": overlapping child literals on feature " + std::to_string(n.feature + 1));
    if (covered != avail)
      diags.push_back(who + ": child literals do not cover every reachable value of feature " + std::to_string(n.feature + 1));
    for (const auto& e : n.children) {
      Bitset effective = e.allowed & avail;
      if (effective.none()) {
        diags.push_back(who + ": edge to '" + tree.nodes[e.target].id.text + "' admits no reachable value");
        continue;
      }
      Bitset saved = reach[n.feature];
      reach[n.feature] = effective;
      self(self, e.target, reach);
      reach[n.feature] = saved;
    }
  };
  walk(walk, tree.root, reaching);

  for (size_t i = 0; i < tree.nodes.size(); ++i)
    if (!visited[i] && static_cast<int>(i) != tree.root && incoming[i] == 0)
      diags.push_back("node '" + tree.nodes[i].id.text + "': unreachable from the root");

  return diags;
}

TreeModel parse_document(const std::string& text, bool semantic_checks) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("JSON syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("top-level document must be a JSON object");

  TreeModel model;
  model.space = parse_features(doc);

  if (!doc.contains("classes") || !doc["classes"].is_array() || doc["classes"].size() < 1)
    throw ParseError("document needs a 'classes' array");
  for (const auto& jc : doc["classes"]) model.tree.classes.push_back(token_from_json(jc, "class label"));

  if (!doc.contains("nodes") || !doc["nodes"].is_object() || doc["nodes"].empty())
    throw ParseError("document needs a non-empty 'nodes' object");

  std::map<std::string, int> index_of;
  for (auto it = doc["nodes"].begin(); it != doc["nodes"].end(); ++it) {
    TreeNode node;
    node.id = {it.key(), !it.key().empty() && it.key().find_first_not_of("0123456789") == std::string::npos};
    const json& jn = it.value();
    if (jn.contains("leaf")) {
      node.leaf = true;
      Token label = token_from_json(jn["leaf"], "leaf label");
      for (size_t c = 0; c < model.tree.classes.size(); ++c)
        if (model.tree.classes[c].text == label.text) node.class_index = static_cast<int>(c);
      if (node.class_index < 0)
        throw ParseError("node '" + node.id.text + "': leaf label '" + label.text + "' is not a declared class");
    } else if (jn.contains("feature")) {
      if (!jn["feature"].is_number_integer()) throw ParseError("node '" + node.id.text + "': 'feature' must be an integer id");
      int fid = jn["feature"].get<int>();
      if (fid < 1 || fid > model.space.size())
        throw ParseError("node '" + node.id.text + "': unknown feature id " + std::to_string(fid));
      node.feature = fid - 1;
    } else {
      throw ParseError("node '" + node.id.text + "': must have either 'leaf' or 'feature'");
    }
    index_of[node.id.text] = static_cast<int>(model.tree.nodes.size());
    model.tree.nodes.push_back(std::move(node));
  }

  if (!doc.contains("root")) throw ParseError("document needs a 'root' node id");
  Token root_id = token_from_json(doc["root"], "root id");
  auto rit = index_of.find(root_id.text);
  if (rit == index_of.end()) throw ParseError("root node '" + root_id.text + "' does not exist");
  model.tree.root = rit->second;

  if (!doc.contains("edges") || !doc["edges"].is_array()) throw ParseError("document needs an 'edges' array");
  for (const auto& je : doc["edges"]) {
    Token from = token_from_json(je.at("from"), "edge 'from'");
    Token to = token_from_json(je.at("to"), "edge 'to'");
    auto fit = index_of.find(from.text);
    auto tit = index_of.find(to.text);
    if (fit == index_of.end()) throw ParseError("edge from unknown node '" + from.text + "'");
    if (tit == index_of.end()) throw ParseError("edge to unknown node '" + to.text + "'");
    TreeNode& parent = model.tree.nodes[fit->second];
    if (parent.leaf) throw ParseError("node '" + from.text + "': leaf cannot have outgoing edges");
    const FeatureSpec& spec = model.space.features[parent.feature];
    if (!je.contains("allowed") || !je["allowed"].is_array() || je["allowed"].empty())
      throw ParseError("edge " + from.text + "->" + to.text + " needs a non-empty 'allowed' list");
    TreeEdge edge;
    edge.target = tit->second;
    edge.allowed = Bitset(static_cast<int>(spec.domain.size()));
    for (const auto& jv : je["allowed"]) {
      Token v = token_from_json(jv, "edge value");
      int vi = spec.value_index(v.text);
      if (vi < 0)
        throw ParseError("edge " + from.text + "->" + to.text + ": value '" + v.text + "' is outside the domain of feature " +
                         std::to_string(spec.id));
      edge.allowed.set(vi);
    }
    parent.children.push_back(std::move(edge));
  }

  // Structural sanity that evaluation depends on: single parent, acyclic.
  {
    std::vector<int> incoming(model.tree.nodes.size(), 0);
    for (const auto& n : model.tree.nodes)
      for (const auto& e : n.children) ++incoming[e.target];
    if (incoming[model.tree.root] != 0) throw ParseError("root node has an incoming edge");
    for (size_t i = 0; i < model.tree.nodes.size(); ++i)
      if (static_cast<int>(i) != model.tree.root && incoming[i] > 1)
        throw ParseError("node '" + model.tree.nodes[i].id.text + "' has multiple incoming edges");
  }

  if (semantic_checks) {
    auto diags = validate_tree(model.tree, model.space);
    if (!diags.empty()) throw ValidationError(std::move(diags));
  }
  return model;
}

std::string serialize_document(const TreeModel& model) {
  json doc;
  doc["features"] = json::array();
  for (const auto& f : model.space.features) {
    json jf;
    jf["id"] = f.id;
    jf["name"] = f.name;
    jf["domain"] = json::array();
    for (const auto& v : f.domain) jf["domain"].push_back(token_to_json(v));
    if (f.explicit_weights) {
      jf["weights"] = json::array();
      for (const auto& w : f.weights) jf["weights"].push_back(w.ratio_string());
    }
    doc["features"].push_back(std::move(jf));
  }
  doc["classes"] = json::array();
  for (const auto& c : model.tree.classes) doc["classes"].push_back(token_to_json(c));
  doc["root"] = token_to_json(model.tree.nodes[model.tree.root].id);
  doc["nodes"] = json::object();
  for (const auto& n : model.tree.nodes) {
    json jn;
    if (n.leaf)
      jn["leaf"] = token_to_json(model.tree.classes[n.class_index]);
    else
      jn["feature"] = n.feature + 1;
    doc["nodes"][n.id.text] = std::move(jn);
  }
  doc["edges"] = json::array();
  for (const auto& n : model.tree.nodes) {
    for (const auto& e : n.children) {
      json je;
      je["from"] = token_to_json(n.id);
      je["to"] = token_to_json(model.tree.nodes[e.target].id);
      je["allowed"] = json::array();
      const FeatureSpec& spec = model.space.features[n.feature];
      e.allowed.for_each([&](int v) { je["allowed"].push_back(token_to_json(spec.domain[v])); });
      doc["edges"].push_back(std::move(je));
    }
  }
  return doc.dump(2);
}

int classify(const TreeModel& model, const std::vector<int>& point) {
  if (static_cast<int>(point.size()) != model.space.size())
    throw DomainError("point has " + std::to_string(point.size()) + " values, expected " + std::to_string(model.space.size()));
  for (int i = 0; i < model.space.size(); ++i)
    if (point[i] < 0 || point[i] >= static_cast<int>(model.space.features[i].domain.size()))
      throw DomainError("value for feature " + std::to_string(i + 1) + " is outside its domain");
  int idx = model.tree.root;
  while (!model.tree.nodes[idx].leaf) {
    const TreeNode& n = model.tree.nodes[idx];
    int next = -1;
    for (const auto& e : n.children) {
      if (e.allowed.test(point[n.feature])) {
        next = e.target;
        break;
      }
    }
    if (next < 0)
      throw DomainError("node '" + n.id.text + "': no edge admits value '" +
                        model.space.features[n.feature].domain[point[n.feature]].text + "' of feature " +
                        std::to_string(n.feature + 1));
    idx = next;
  }
  return model.tree.nodes[idx].class_index;
}

std::vector<int> parse_point(const TreeModel& model, const std::vector<std::string>& tokens) {
  if (static_cast<int>(tokens.size()) != model.space.size())
    throw DomainError("instance has " + std::to_string(tokens.size()) + " values, expected " + std::to_string(model.space.size()));
  std::vector<int> point(tokens.size());
  for (int i = 0; i < model.space.size(); ++i) {
    int vi = model.space.features[i].value_index(tokens[i]);
    if (vi < 0)
      throw DomainError("value '" + tokens[i] + "' is outside the domain of feature " + std::to_string(i + 1) + " ('" +
                        model.space.features[i].name + "')");
    point[i] = vi;
  }
  return point;
}

Instance make_instance(const TreeModel& model, const std::vector<int>& point) {
  Instance inst;
  inst.values = point;
  inst.class_index = classify(model, point);
  return inst;
}

std::vector<Path> enumerate_paths(const TreeModel& model) {
  std::vector<Path> paths;
  int m = model.space.size();
  std::vector<int> node_seq;
  std::vector<std::pair<int, Bitset>> tested;

  auto dfs = [&](auto&& self, int idx) -> void {
    node_seq.push_back(idx);
    const TreeNode& n = model.tree.nodes[idx];
    if (n.leaf) {
      Path p;
      p.nodes = node_seq;
      p.class_index = n.class_index;
      p.tested = tested;
      std::sort(p.tested.begin(), p.tested.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      p.tested_mask = Bitset(m);
      for (const auto& [f, _] : p.tested) p.tested_mask.set(f);
      paths.push_back(std::move(p));
    } else {
      for (const auto& e : n.children) {
        size_t slot = 0;
        while (slot < tested.size() && tested[slot].first != n.feature) ++slot;
        if (slot == tested.size()) {
          tested.emplace_back(n.feature, e.allowed);
          self(self, e.target);
          tested.pop_back();
        } else {
          Bitset saved = tested[slot].second;
          tested[slot].second &= e.allowed;  // repeated test: cumulative intersection
          self(self, e.target);
          tested[slot].second = saved;
        }
      }
    }
    node_seq.pop_back();
  };
  dfs(dfs, model.tree.root);
  return paths;
}

std::string describe_point(const TreeModel& model, const std::vector<int>& point) {
  std::string out;
  for (int i = 0; i < model.space.size(); ++i) {
    if (i) out.push_back(',');
    out += model.space.features[i].domain[point[i]].text;
  }
  return out;
}

}  // namespace relset
