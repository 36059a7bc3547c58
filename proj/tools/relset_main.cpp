#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "relset/dataset.hpp"
#include "relset/enumerate.hpp"
#include "relset/explain.hpp"
#include "relset/measure.hpp"
#include "relset/model.hpp"
#include "relset/oracle.hpp"
#include "relset/report.hpp"

namespace {

using nlohmann::json;
using namespace relset;

constexpr int kExitBadArgs = 2;
constexpr int kExitParse = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitDisagree = 5;

struct BadArguments : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& output, const std::string& text) {
  if (output.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + output);
  out << text;
}

Rational parse_delta(const std::string& text) {
  Rational delta;
  try {
    delta = Rational::parse(text);
  } catch (const std::invalid_argument& e) {
    throw BadArguments(e.what());
  }
  if (delta < Rational(0) || delta > Rational(1)) throw BadArguments("delta must lie in [0,1], got " + text);
  return delta;
}

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      ids.push_back(std::stoi(item));
    } catch (...) {
      throw BadArguments("expected a comma-separated list of feature ids, got '" + text + "'");
    }
  }
  if (ids.empty()) throw BadArguments("empty feature id list");
  return ids;
}

struct ExplainArgs {
  std::string tree, dataset, instance, delta, algorithm = "idrs", order = "asc", seed_set, check = "exact";
  std::string output, format = "json";
  bool unique = false;
  int jobs = 1;
};

struct EnumerateArgs {
  std::string tree, instance, delta, output, format = "json";
  int limit = 0;
  bool duals = false;
};

struct VerifyArgs {
  std::string tree, dataset;
  int random_cases = 0;
  unsigned long long gen_seed = 20240101;
  int subsets = 12;
};

struct PathsArgs {
  std::string tree, output, format = "table";
};

json config_echo(const ExplainArgs& a) {
  json cfg;
  cfg["command"] = "explain";
  cfg["tree"] = a.tree;
  cfg["delta"] = rational_json(parse_delta(a.delta));
  cfg["algorithm"] = a.algorithm;
  cfg["order"] = a.order;
  cfg["check"] = a.check;
  if (!a.seed_set.empty()) cfg["seed_set"] = parse_id_list(a.seed_set);
  cfg["unique"] = a.unique;
  cfg["jobs"] = a.jobs;
  return cfg;
}

int run_explain(const ExplainArgs& args) {
  if (args.dataset.empty() == args.instance.empty())
    throw BadArguments("exactly one of --dataset and --instance is required");
  if (args.algorithm != "idrs" && args.algorithm != "mincard")
    throw BadArguments("--algorithm must be idrs or mincard");
  if (args.check != "exact" && args.check != "paths") throw BadArguments("--check must be exact or paths");
  if (args.format != "json" && args.format != "csv") throw BadArguments("--format must be json or csv");
  if (args.jobs < 1) throw BadArguments("--jobs must be at least 1");

  Rational delta = parse_delta(args.delta);
  Ordering order = Ordering::ascending();
  if (args.order == "greedy")
    order = Ordering::greedy();
  else if (args.order != "asc")
    order = Ordering::given(parse_id_list(args.order));
  CandidateCheck check = args.check == "paths" ? CandidateCheck::paths : CandidateCheck::exact;

  TreeModel model = parse_document(read_file(args.tree));
  std::vector<Path> paths = enumerate_paths(model);
  const int m = model.space.size();

  std::optional<Bitset> seed;
  if (!args.seed_set.empty()) {
    auto ids = parse_id_list(args.seed_set);
    for (int id : ids)
      if (id < 1 || id > m) throw BadArguments("seed feature id " + std::to_string(id) + " out of range 1.." + std::to_string(m));
    seed = Bitset::from_ids(m, ids);
  }

  struct Row {
    int index;
    std::vector<std::string> values;
    std::string declared;
  };
  std::vector<Row> rows;
  if (!args.instance.empty()) {
    rows.push_back({0, split_csv_line(args.instance), ""});
  } else {
    Dataset data = parse_csv(read_file(args.dataset), model);
    std::vector<int> keep;
    if (args.unique)
      keep = unique_rows(data);
    else
      for (size_t i = 0; i < data.rows.size(); ++i) keep.push_back(static_cast<int>(i));
    for (int i : keep)
      rows.push_back({i, data.rows[i], data.has_class_column ? data.declared_class[i] : std::string()});
  }

  std::vector<InstanceRecord> records(rows.size());
  std::atomic<size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      size_t i = cursor.fetch_add(1);
      if (i >= rows.size()) return;
      try {
        Instance inst = make_instance(model, parse_point(model, rows[i].values));
        auto start = std::chrono::steady_clock::now();
        Explanation ex = args.algorithm == "mincard"
                             ? min_cardinality_relevant_set(model, paths, inst, delta)
                             : min_relevant_set(model, paths, inst, delta, order, seed, check);
        auto stop = std::chrono::steady_clock::now();
        InstanceRecord rec;
        rec.row = rows[i].index;
        rec.subset = ex.subset;
        rec.epsilon = ex.epsilon;
        rec.precision = ex.precision;
        rec.trace = std::move(ex.trace);
        rec.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        rec.predicted_class = model.tree.classes[inst.class_index].text;
        rec.declared_class = rows[i].declared;
        rec.declared_agrees = rows[i].declared.empty() || rows[i].declared == rec.predicted_class;
        records[i] = std::move(rec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (args.jobs == 1 || rows.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(args.jobs, static_cast<int>(rows.size())); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  if (args.format == "csv")
    write_output(args.output, report_csv(records));
  else
    write_output(args.output, run_report(config_echo(args), records).dump(2));
  return 0;
}

int run_enumerate(const EnumerateArgs& args) {
  if (args.instance.empty()) throw BadArguments("--instance is required");
  Rational delta = parse_delta(args.delta);
  TreeModel model = parse_document(read_file(args.tree));
  std::vector<Path> paths = enumerate_paths(model);
  Instance inst = make_instance(model, parse_point(model, split_csv_line(args.instance)));
  std::optional<int> limit = args.limit > 0 ? std::optional<int>(args.limit) : std::nullopt;

  bool truncated_c = false;
  auto family = enumerate_min_relevant(model, paths, inst, delta, limit, &truncated_c);

  json out;
  out["config"] = {{"command", "enumerate"}, {"tree", args.tree}, {"delta", rational_json(delta)},
                   {"instance", args.instance}, {"duals", args.duals}};
  if (limit) out["config"]["limit"] = *limit;
  out["cmin"] = json::array();
  for (const auto& ex : family) {
    out["cmin"].push_back({{"subset", ex.subset},
                           {"epsilon", rational_json(ex.epsilon)},
                           {"precision", rational_json(ex.precision)}});
  }
  out["truncated"] = truncated_c;

  if (args.duals) {
    bool truncated_d = false;
    auto duals = enumerate_min_duals(model, paths, inst, delta, limit, &truncated_d);
    out["dmin"] = duals;
    out["truncated"] = truncated_c || truncated_d;
    if (truncated_c || truncated_d) {
      out["duality"] = "skipped: families truncated";
    } else {
      std::vector<std::vector<int>> cmin_sets;
      for (const auto& ex : family) cmin_sets.push_back(ex.subset);
      auto violation = verify_duality(cmin_sets, duals, model.space.size());
      if (violation)
        out["duality"] = {{"violation", {{"side", violation->side}, {"set", violation->set}, {"reason", violation->reason}}}};
      else
        out["duality"] = "ok";
    }
  }
  write_output(args.output, out.dump(2));
  return 0;
}

int run_paths(const PathsArgs& args) {
  if (args.format != "table" && args.format != "json") throw BadArguments("--format must be table or json");
  TreeModel model = parse_document(read_file(args.tree));
  std::vector<Path> paths = enumerate_paths(model);
  Rational total;
  json jpaths = json::array();
  std::ostringstream table;
  table << "#\tnodes\tclass\tprobability\tdecimal\n";
  for (size_t i = 0; i < paths.size(); ++i) {
    Rational prob = path_probability(paths[i], model.space);
    total += prob;
    std::string nodes;
    for (size_t k = 0; k < paths[i].nodes.size(); ++k) {
      if (k) nodes.push_back('>');
      nodes += model.tree.nodes[paths[i].nodes[k]].id.text;
    }
    const std::string& label = model.tree.classes[paths[i].class_index].text;
    table << (i + 1) << '\t' << nodes << '\t' << label << '\t' << prob.ratio_string() << '\t' << prob.decimal_string()
          << '\n';
    jpaths.push_back({{"nodes", nodes}, {"class", label}, {"probability", rational_json(prob)}});
  }
  table << "sum\t\t\t" << total.ratio_string() << '\t' << total.decimal_string() << '\n';

  if (args.format == "json") {
    json out;
    out["paths"] = std::move(jpaths);
    out["total"] = rational_json(total);
    write_output(args.output, out.dump(2));
  } else {
    write_output(args.output, table.str());
  }
  return 0;
}

// Oracle-vs-engine agreement suite; returns the first disagreement.
std::optional<std::string> verify_model(const TreeModel& model, const std::vector<std::vector<std::string>>& instance_rows,
                                        int subsets_per_instance, uint64_t seed) {
  auto diags = validate_tree(model.tree, model.space);
  if (!diags.empty()) return "validate: " + diags.front();

  std::vector<Path> paths = enumerate_paths(model);
  Rational total;
  for (const auto& p : paths) total += path_probability(p, model.space);
  if (total != Rational(1)) return "path probabilities sum to " + total.ratio_string() + ", expected 1/1";

  std::mt19937_64 rng(seed);
  const int m = model.space.size();

  uint64_t points = 1;
  for (const auto& f : model.space.features) points *= f.domain.size();

  auto check_point = [&](const std::vector<int>& point) -> std::optional<std::string> {
    int consistent = 0, match_class = -1;
    for (const auto& p : paths) {
      bool ok = true;
      for (const auto& [f, allowed] : p.tested) ok = ok && allowed.test(point[f]);
      if (ok) {
        ++consistent;
        match_class = p.class_index;
      }
    }
    if (consistent != 1)
      return "point " + describe_point(model, point) + " is consistent with " + std::to_string(consistent) +
             " paths, expected exactly 1";
    int walked;
    try {
      walked = classify(model, point);
    } catch (const DomainError& e) {
      return std::string("classify failed: ") + e.what();
    }
    if (walked != match_class)
      return "point " + describe_point(model, point) + ": classify says '" + model.tree.classes[walked].text +
             "' but its path predicts '" + model.tree.classes[match_class].text + "'";
    return std::nullopt;
  };

  if (points <= 4096) {
    std::vector<int> point(m, 0);
    auto rec = [&](auto&& self, int f) -> std::optional<std::string> {
      if (f == m) return check_point(point);
      for (size_t v = 0; v < model.space.features[f].domain.size(); ++v) {
        point[f] = static_cast<int>(v);
        if (auto bad = self(self, f + 1)) return bad;
      }
      return std::nullopt;
    };
    if (auto bad = rec(rec, 0)) return bad;
  } else {
    for (int i = 0; i < 1000; ++i)
      if (auto bad = check_point(random_point(model, rng))) return bad;
  }

  std::vector<Instance> instances;
  for (const auto& row : instance_rows) instances.push_back(make_instance(model, parse_point(model, row)));
  while (instances.size() < 3) instances.push_back(make_instance(model, random_point(model, rng)));

  for (const auto& inst : instances) {
    for (int s = 0; s < subsets_per_instance; ++s) {
      Bitset subset = random_subset(m, rng);
      MeasureReport engine = measure_report(paths, inst, subset, model.space);
      BruteReport brute = brute_measures(model, inst, subset);
      std::string where = " for subset {";
      bool first = true;
      subset.for_each([&](int f) {
        where += (first ? "" : ",") + std::to_string(f + 1);
        first = false;
      });
      where += "} on instance " + describe_point(model, inst.values);
      if (engine.epsilon != brute.epsilon)
        return "epsilon " + engine.epsilon.ratio_string() + " != oracle " + brute.epsilon.ratio_string() + where;
      if (engine.precision != brute.precision)
        return "precision " + engine.precision.ratio_string() + " != oracle " + brute.precision.ratio_string() + where;
      if (engine.fix_prob != brute.fix_prob)
        return "fix probability " + engine.fix_prob.ratio_string() + " != oracle " + brute.fix_prob.ratio_string() + where;
      if (engine.epsilon != engine.fix_prob * (Rational(1) - engine.precision))
        return "identity epsilon = fix * (1 - precision) violated" + where;
    }
  }

  if (m <= 10 && points <= 4096) {
    const Rational delta(1, 8);
    const Instance& inst = instances.front();
    auto engine_family = enumerate_min_relevant(model, paths, inst, delta);
    auto brute_family = brute_minimal_relevant(model, inst, delta);
    std::vector<std::vector<int>> engine_sets;
    for (const auto& ex : engine_family) engine_sets.push_back(ex.subset);
    auto canon = [](std::vector<std::vector<int>> fam) {
      std::sort(fam.begin(), fam.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
      });
      return fam;
    };
    if (canon(engine_sets) != canon(brute_family)) return "minimal relevant families disagree with the oracle at delta 1/8";
    auto engine_duals = enumerate_min_duals(model, paths, inst, delta);
    auto brute_duals = brute_minimal_duals(model, inst, delta);
    if (canon(engine_duals) != canon(brute_duals)) return "minimal dual families disagree with the oracle at delta 1/8";
    if (auto violation = verify_duality(engine_sets, engine_duals, m))
      return "duality check failed: " + violation->reason;
  }
  return std::nullopt;
}

int run_verify(const VerifyArgs& args) {
  if (args.tree.empty() && args.random_cases <= 0)
    throw BadArguments("verify needs --tree and/or --random N");

  int checked = 0;
  if (!args.tree.empty()) {
    TreeModel model = parse_document(read_file(args.tree), /*semantic_checks=*/false);
    std::vector<std::vector<std::string>> rows;
    if (!args.dataset.empty()) {
      Dataset data = parse_csv(read_file(args.dataset), model);
      rows = data.rows;
    }
    if (auto bad = verify_model(model, rows, args.subsets, args.gen_seed)) {
      std::cout << "DISAGREE [" << args.tree << "]: " << *bad << "\n";
      return kExitDisagree;
    }
    std::cout << "ok [" << args.tree << "]\n";
    ++checked;
  }
  for (int i = 0; i < args.random_cases; ++i) {
    TreeGenParams params;
    params.seed = args.gen_seed + static_cast<uint64_t>(i);
    params.feature_count = 4 + i % 5;
    params.max_depth = 5;
    params.weighted = i % 3 == 0;
    TreeModel model = generate_tree(params);
    if (auto bad = verify_model(model, {}, args.subsets, params.seed * 977 + 1)) {
      std::cout << "DISAGREE [random case " << i << ", seed " << params.seed << "]: " << *bad << "\n";
      return kExitDisagree;
    }
    ++checked;
  }
  std::cout << "verified " << checked << " model(s): engine and oracle agree\n";
  return 0;
}

json error_json(int code, const std::string& message) {
  return json{{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact probabilistic explanations for decision-tree classifiers"};
  app.require_subcommand(1);

  ExplainArgs ex;
  auto* cmd_explain = app.add_subcommand("explain", "Compute one explanation per instance");
  cmd_explain->add_option("--tree", ex.tree, "Tree document (JSON)")->required();
  cmd_explain->add_option("--dataset", ex.dataset, "CSV of instances");
  cmd_explain->add_option("--instance", ex.instance, "Inline CSV row");
  cmd_explain->add_option("--delta", ex.delta, "Error threshold, exact (\"0.03\" or \"3/100\")")->required();
  cmd_explain->add_option("--algorithm", ex.algorithm, "idrs | mincard");
  cmd_explain->add_option("--order", ex.order, "asc | greedy | comma list of feature ids");
  cmd_explain->add_option("--seed-set", ex.seed_set, "Starting feature set (comma list)");
  cmd_explain->add_option("--check", ex.check, "Deletion candidate check: exact | paths");
  cmd_explain->add_flag("--unique", ex.unique, "Deduplicate dataset rows");
  cmd_explain->add_option("--jobs", ex.jobs, "Explain rows concurrently");
  cmd_explain->add_option("--output", ex.output, "Write the report here instead of stdout");
  cmd_explain->add_option("--format", ex.format, "json | csv");

  EnumerateArgs en;
  auto* cmd_enumerate = app.add_subcommand("enumerate", "Enumerate all minimal relevant sets");
  cmd_enumerate->add_option("--tree", en.tree, "Tree document (JSON)")->required();
  cmd_enumerate->add_option("--instance", en.instance, "Inline CSV row")->required();
  cmd_enumerate->add_option("--delta", en.delta, "Error threshold")->required();
  cmd_enumerate->add_option("--limit", en.limit, "Stop after this many sets per family");
  cmd_enumerate->add_flag("--duals", en.duals, "Also enumerate minimal dual sets and verify duality");
  cmd_enumerate->add_option("--output", en.output, "Write the report here instead of stdout");
  cmd_enumerate->add_option("--format", en.format, "json");

  VerifyArgs ve;
  auto* cmd_verify = app.add_subcommand("verify", "Check the engine against the brute-force oracle");
  cmd_verify->add_option("--tree", ve.tree, "Tree document (JSON)");
  cmd_verify->add_option("--dataset", ve.dataset, "Instances to verify on");
  cmd_verify->add_option("--random", ve.random_cases, "Also verify N seeded random trees");
  cmd_verify->add_option("--seed", ve.gen_seed, "Seed for random trees and subsets");
  cmd_verify->add_option("--subsets", ve.subsets, "Random subsets per instance");

  PathsArgs pa;
  auto* cmd_paths = app.add_subcommand("paths", "Print every root-to-leaf path with its probability");
  cmd_paths->add_option("--tree", pa.tree, "Tree document (JSON)")->required();
  cmd_paths->add_option("--output", pa.output, "Write here instead of stdout");
  cmd_paths->add_option("--format", pa.format, "table | json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadArgs;
  }

  try {
    if (app.got_subcommand(cmd_explain)) return run_explain(ex);
    if (app.got_subcommand(cmd_enumerate)) return run_enumerate(en);
    if (app.got_subcommand(cmd_verify)) return run_verify(ve);
    if (app.got_subcommand(cmd_paths)) return run_paths(pa);
  } catch (const BadArguments& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadArgs;
  } catch (const ValidationError& e) {
    json diag = error_json(kExitParse, e.what());
    diag["error"]["diagnostics"] = e.diagnostics;
    std::cout << diag.dump(2) << "\n";
    return kExitParse;
  } catch (const ParseError& e) {
    std::cout << error_json(kExitParse, e.what()).dump(2) << "\n";
    return kExitParse;
  } catch (const DomainError& e) {
    std::cout << error_json(kExitParse, e.what()).dump(2) << "\n";
    return kExitParse;
  } catch (const DatasetError& e) {
    std::cout << error_json(kExitParse, e.what()).dump(2) << "\n";
    return kExitParse;
  } catch (const InfeasibleSeed& e) {
    std::cout << error_json(kExitInfeasible, e.what()).dump(2) << "\n";
    return kExitInfeasible;
  } catch (const BudgetExhausted& e) {
    std::cout << error_json(kExitInfeasible, e.what()).dump(2) << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
