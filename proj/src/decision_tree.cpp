#include "helmex/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "helmex/errors.hpp"

namespace helmex {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kTreeFormatVersion = 1;

std::int64_t total(const LabelCounts& c) {
  return std::accumulate(c.begin(), c.end(), std::int64_t{0});
}

Behaviour majority_label(const LabelCounts& c) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (c[k] > c[best]) best = k;
  }
  return static_cast<Behaviour>(best);
}

double gini_of(const LabelCounts& c, std::int64_t n) {
  double sum = 0.0;
  for (std::int64_t k : c) {
    const double p = static_cast<double>(k) / static_cast<double>(n);
    sum += p * p;
  }
  return 1.0 - sum;
}

struct SplitSearchResult {
  SplitCondition condition;
  double decrease = 0.0;
};

/// Exhaustive search over the rows subset. Candidates violating
/// min_samples_leaf are skipped; ties resolve to the lowest feature
/// index, then the smallest cutoff/category, via strict improvement.
std::optional<SplitSearchResult> search_split(const TrainingSet& data,
                                              std::span<const std::int32_t> rows,
                                              const FitParams& params) {
  const std::int64_t n = static_cast<std::int64_t>(rows.size());
  if (n < 2) return std::nullopt;

  LabelCounts parent{};
  for (std::int32_t r : rows) ++parent[static_cast<std::size_t>(data.labels[r])];
  const double parent_gini = gini_of(parent, n);
  if (parent_gini == 0.0) return std::nullopt;

  std::optional<SplitSearchResult> best;
  const auto consider = [&](const SplitCondition& cond, const LabelCounts& left,
                            std::int64_t n_left) {
    const std::int64_t n_right = n - n_left;
    if (n_left < params.min_samples_leaf || n_right < params.min_samples_leaf) return;
    LabelCounts right{};
    for (std::size_t k = 0; k < right.size(); ++k) right[k] = parent[k] - left[k];
    const double weighted = (static_cast<double>(n_left) * gini_of(left, n_left) +
                             static_cast<double>(n_right) * gini_of(right, n_right)) /
                            static_cast<double>(n);
    const double decrease = parent_gini - weighted;
    if (!best || decrease > best->decrease) best = SplitSearchResult{cond, decrease};
  };

  for (int f = 0; f < static_cast<int>(data.schema->size()); ++f) {
    const FeatureSpec& spec = data.schema->at(static_cast<std::size_t>(f));
    if (spec.kind == FeatureKind::Numeric) {
      std::vector<std::int32_t> order(rows.begin(), rows.end());
      std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        return data.features[a].values[f].number < data.features[b].values[f].number;
      });
      LabelCounts left{};
      std::int64_t n_left = 0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        ++left[static_cast<std::size_t>(data.labels[order[i]])];
        ++n_left;
        const double lo = data.features[order[i]].values[f].number;
        const double hi = data.features[order[i + 1]].values[f].number;
        if (lo == hi) continue;
        SplitCondition cond;
        cond.feature = f;
        cond.kind = SplitKind::Threshold;
        cond.cutoff = lo + (hi - lo) / 2.0;
        consider(cond, left, n_left);
      }
    } else {
      // One-vs-rest over the categories present, in lexicographic order.
      std::map<std::string, LabelCounts> per_category;
      for (std::int32_t r : rows) {
        LabelCounts& c = per_category[data.features[r].values[f].category];
        ++c[static_cast<std::size_t>(data.labels[r])];
      }
      if (per_category.size() < 2) continue;
      for (const auto& [category, counts] : per_category) {
        SplitCondition cond;
        cond.feature = f;
        cond.kind = SplitKind::Equality;
        cond.category = category;
        consider(cond, counts, total(counts));
      }
    }
  }

  if (!best || best->decrease < params.min_impurity_decrease) return std::nullopt;
  return best;
}

struct Builder {
  const TrainingSet& data;
  const FitParams& params;
  std::vector<TreeNode> nodes;

  std::int32_t build(std::vector<std::int32_t> rows, int depth) {
    TreeNode node;
    for (std::int32_t r : rows) ++node.counts[static_cast<std::size_t>(data.labels[r])];
    node.majority = majority_label(node.counts);

    std::optional<SplitSearchResult> found;
    if (depth < params.max_depth) found = search_split(data, rows, params);
    if (found) {
      std::vector<std::int32_t> left_rows, right_rows;
      left_rows.reserve(rows.size());
      right_rows.reserve(rows.size());
      for (std::int32_t r : rows) {
        const FeatureValue& v = data.features[r].values[found->condition.feature];
        (found->condition.goes_left(v) ? left_rows : right_rows).push_back(r);
      }
      node.split = found->condition;
      const std::int32_t self = static_cast<std::int32_t>(nodes.size());
      nodes.push_back(std::move(node));
      const std::int32_t left = build(std::move(left_rows), depth + 1);
      const std::int32_t right = build(std::move(right_rows), depth + 1);
      nodes[self].left = left;
      nodes[self].right = right;
      return self;
    }

    const std::int32_t self = static_cast<std::int32_t>(nodes.size());
    nodes.push_back(std::move(node));
    return self;
  }
};

const TreeNode& descend(const DecisionTree& tree, const FeatureVector& fv) {
  const TreeNode* node = &tree.nodes()[static_cast<std::size_t>(tree.root())];
  while (!node->is_leaf()) {
    const FeatureValue& v = fv.values[static_cast<std::size_t>(node->split->feature)];
    node = &tree.nodes()[static_cast<std::size_t>(node->split->goes_left(v) ? node->left
                                                                            : node->right)];
  }
  return *node;
}

void check_fingerprint(const DecisionTree& tree, const FeatureVector& fv) {
  if (fv.schema_fingerprint != tree.schema_fingerprint()) {
    std::ostringstream msg;
    msg << "feature schema mismatch: vector fingerprint " << std::hex << fv.schema_fingerprint
        << " vs tree fingerprint " << tree.schema_fingerprint();
    throw SchemaMismatchError(msg.str());
  }
  if (fv.values.size() != tree.schema().size())
    throw SchemaMismatchError("feature vector length does not match schema");
}

/// Structural validation shared by the constructor and deserialization:
/// acyclic, exactly one parent per non-root node, sane leaves.
void validate_structure(const FeatureSchema& schema, const std::vector<TreeNode>& nodes,
                        std::int32_t root) {
  if (nodes.empty()) throw ParseError("tree has no nodes");
  const std::int32_t n = static_cast<std::int32_t>(nodes.size());
  if (root < 0 || root >= n) throw ParseError("tree root index out of range");

  std::vector<int> parents(nodes.size(), 0);
  for (std::int32_t i = 0; i < n; ++i) {
    const TreeNode& node = nodes[static_cast<std::size_t>(i)];
    if (node.is_leaf()) {
      if (node.left != -1 || node.right != -1)
        throw ParseError("leaf node " + std::to_string(i) + " has children");
      if (total(node.counts) <= 0)
        throw ParseError("leaf node " + std::to_string(i) + " has an empty distribution");
      if (node.counts[static_cast<std::size_t>(node.majority)] !=
          *std::max_element(node.counts.begin(), node.counts.end()))
        throw ParseError("leaf node " + std::to_string(i) +
                         ": majority label does not attain the maximum count");
    } else {
      const SplitCondition& s = *node.split;
      if (s.feature < 0 || s.feature >= static_cast<int>(schema.size()))
        throw ParseError("node " + std::to_string(i) + ": split feature out of schema bounds");
      const FeatureKind kind = schema.at(static_cast<std::size_t>(s.feature)).kind;
      if (s.kind == SplitKind::Threshold) {
        if (kind != FeatureKind::Numeric)
          throw ParseError("node " + std::to_string(i) +
                           ": threshold split on a non-numeric feature");
        if (!std::isfinite(s.cutoff))
          throw ParseError("node " + std::to_string(i) + ": non-finite cutoff");
      } else if (kind == FeatureKind::Numeric) {
        throw ParseError("node " + std::to_string(i) + ": equality split on a numeric feature");
      }
      for (std::int32_t child : {node.left, node.right}) {
        if (child < 0 || child >= n)
          throw ParseError("node " + std::to_string(i) + ": child index out of range");
        if (child == root) throw ParseError("tree root has a parent");
        ++parents[static_cast<std::size_t>(child)];
      }
    }
  }
  for (std::int32_t i = 0; i < n; ++i) {
    const int expected = (i == root) ? 0 : 1;
    if (parents[static_cast<std::size_t>(i)] != expected)
      throw ParseError("node " + std::to_string(i) + " has " +
                       std::to_string(parents[static_cast<std::size_t>(i)]) +
                       " parents (expected " + std::to_string(expected) + ")");
  }
  // Parent uniqueness plus a parentless root makes reachability total
  // and rules out cycles; confirm with a walk.
  std::vector<char> seen(nodes.size(), 0);
  std::vector<std::int32_t> stack{root};
  std::size_t visited = 0;
  while (!stack.empty()) {
    const std::int32_t i = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(i)])
      throw ParseError("tree contains a cycle through node " + std::to_string(i));
    seen[static_cast<std::size_t>(i)] = 1;
    ++visited;
    const TreeNode& node = nodes[static_cast<std::size_t>(i)];
    if (!node.is_leaf()) {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  if (visited != nodes.size()) throw ParseError("tree contains unreachable nodes");
}

}  // namespace

void FitParams::validate() const {
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
  if (min_impurity_decrease < 0) throw ConfigError("min_impurity_decrease must be >= 0");
}

TrainingSet build_training_set(std::span<const TraceRecord> records) {
  TrainingSet data;
  data.features.reserve(records.size());
  data.labels.reserve(records.size());
  for (const TraceRecord& r : records) {
    FeatureVector fv = featurize(r.state);
    if (fv.schema_fingerprint != data.schema->fingerprint())
      throw SchemaMismatchError("record does not match the training schema");
    data.features.push_back(std::move(fv));
    data.labels.push_back(r.behaviour);
  }
  return data;
}

DecisionTree::DecisionTree(FeatureSchema schema, std::vector<TreeNode> nodes, std::int32_t root)
    : schema_(std::move(schema)), nodes_(std::move(nodes)), root_(root) {
  validate_structure(schema_, nodes_, root_);
}

int DecisionTree::depth() const {
  int best = 0;
  std::vector<std::pair<std::int32_t, int>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    const TreeNode& node = nodes_[static_cast<std::size_t>(i)];
    if (node.is_leaf()) {
      best = std::max(best, d);
    } else {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return best;
}

std::size_t DecisionTree::leaf_count() const {
  std::size_t n = 0;
  for (const TreeNode& node : nodes_) n += node.is_leaf() ? 1 : 0;
  return n;
}

double gini(const LabelCounts& counts) {
  const std::int64_t n = total(counts);
  if (n <= 0) throw Error("gini requires a non-empty count set");
  return gini_of(counts, n);
}

double gini(std::span<const std::int64_t> counts) {
  LabelCounts c{};
  if (counts.size() > c.size()) throw Error("too many label counts");
  std::copy(counts.begin(), counts.end(), c.begin());
  return gini(c);
}

std::optional<SplitCondition> best_split(const TrainingSet& data, const FitParams& params) {
  params.validate();
  if (data.size() < 2) throw Error("best_split requires at least 2 records");
  std::vector<std::int32_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  auto found = search_split(data, rows, params);
  if (!found) return std::nullopt;
  return found->condition;
}

DecisionTree fit_tree(const TrainingSet& data, const FitParams& params) {
  params.validate();
  if (data.size() == 0) throw Error("fit_tree requires at least 1 record");
  for (const FeatureVector& fv : data.features) {
    if (fv.schema_fingerprint != data.schema->fingerprint() ||
        fv.values.size() != data.schema->size())
      throw SchemaMismatchError("training records disagree on the feature schema");
  }
  Builder builder{data, params, {}};
  std::vector<std::int32_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  const std::int32_t root = builder.build(std::move(rows), 0);
  return DecisionTree(*data.schema, std::move(builder.nodes), root);
}

Prediction predict(const DecisionTree& tree, const FeatureVector& fv) {
  check_fingerprint(tree, fv);
  const TreeNode& leaf = descend(tree, fv);
  const std::int64_t n = total(leaf.counts);
  return Prediction{leaf.majority,
                    static_cast<double>(leaf.counts[static_cast<std::size_t>(leaf.majority)]) /
                        static_cast<double>(n)};
}

double fidelity(const DecisionTree& tree, const TrainingSet& data) {
  if (data.size() == 0) throw Error("fidelity requires a non-empty trace");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict(tree, data.features[i]).label == data.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

double fidelity(const DecisionTree& tree, std::span<const TraceRecord> records) {
  return fidelity(tree, build_training_set(records));
}

std::string serialize_tree(const DecisionTree& tree) {
  ordered_json o;
  o["version"] = kTreeFormatVersion;
  ordered_json schema = ordered_json::array();
  for (const FeatureSpec& f : tree.schema().specs()) {
    schema.push_back({{"name", f.name}, {"kind", std::string(to_string(f.kind))},
                      {"unit", f.unit}});
  }
  o["schema"] = std::move(schema);
  o["root"] = tree.root();
  ordered_json nodes = ordered_json::array();
  for (const TreeNode& node : tree.nodes()) {
    ordered_json jn;
    if (node.is_leaf()) {
      ordered_json counts;
      for (std::size_t k = 0; k < node.counts.size(); ++k) {
        if (node.counts[k] > 0)
          counts[std::string(to_string(static_cast<Behaviour>(k)))] = node.counts[k];
      }
      jn["counts"] = std::move(counts);
      jn["majority"] = std::string(to_string(node.majority));
    } else {
      ordered_json split;
      split["feature"] = node.split->feature;
      if (node.split->kind == SplitKind::Threshold) {
        split["kind"] = "threshold";
        split["cutoff"] = node.split->cutoff;
      } else {
        split["kind"] = "equality";
        split["category"] = node.split->category;
      }
      jn["split"] = std::move(split);
      jn["left"] = node.left;
      jn["right"] = node.right;
    }
    nodes.push_back(std::move(jn));
  }
  o["nodes"] = std::move(nodes);
  return o.dump();
}

DecisionTree deserialize_tree(std::string_view text) {
  const ordered_json o = ordered_json::parse(text, nullptr, false);
  if (o.is_discarded() || !o.is_object()) throw ParseError("tree file is not a JSON object");
  if (!o.contains("version") || !o.at("version").is_number_integer())
    throw ParseError("tree file is missing its version tag");
  if (o.at("version").get<int>() != kTreeFormatVersion)
    throw ParseError("unsupported tree format version " +
                     std::to_string(o.at("version").get<int>()));

  if (!o.contains("schema") || !o.at("schema").is_array())
    throw ParseError("tree file is missing its schema");
  std::vector<FeatureSpec> specs;
  for (const auto& jf : o.at("schema")) {
    FeatureSpec f;
    f.name = jf.at("name").get<std::string>();
    f.kind = feature_kind_from_string(jf.at("kind").get<std::string>());
    f.unit = jf.value("unit", std::string());
    specs.push_back(std::move(f));
  }
  FeatureSchema schema(std::move(specs));

  if (!o.contains("nodes") || !o.at("nodes").is_array())
    throw ParseError("tree file is missing its node array");
  std::vector<TreeNode> nodes;
  for (const auto& jn : o.at("nodes")) {
    TreeNode node;
    if (jn.contains("split")) {
      const auto& js = jn.at("split");
      SplitCondition s;
      s.feature = js.at("feature").get<int>();
      const std::string kind = js.at("kind").get<std::string>();
      if (kind == "threshold") {
        s.kind = SplitKind::Threshold;
        if (!js.contains("cutoff") || !js.at("cutoff").is_number())
          throw ParseError("threshold split missing a numeric cutoff");
        s.cutoff = js.at("cutoff").get<double>();
      } else if (kind == "equality") {
        s.kind = SplitKind::Equality;
        s.category = js.at("category").get<std::string>();
      } else {
        throw ParseError("unknown split kind: \"" + kind + "\"");
      }
      node.split = std::move(s);
      node.left = jn.at("left").get<std::int32_t>();
      node.right = jn.at("right").get<std::int32_t>();
    } else {
      if (!jn.contains("counts") || !jn.at("counts").is_object())
        throw ParseError("leaf node is missing its counts");
      for (const auto& [label, count] : jn.at("counts").items()) {
        const auto b = behaviour_from_string(label);
        if (!b) throw ParseError("leaf counts reference unknown label \"" + label + "\"");
        if (!count.is_number_integer() || count.get<std::int64_t>() < 0)
          throw ParseError("leaf count for \"" + label + "\" must be a non-negative integer");
        node.counts[static_cast<std::size_t>(*b)] = count.get<std::int64_t>();
      }
      const auto m = behaviour_from_string(jn.value("majority", std::string()));
      if (!m) throw ParseError("leaf node is missing a valid majority label");
      node.majority = *m;
    }
    nodes.push_back(std::move(node));
  }
  const std::int32_t root = o.value("root", std::int32_t{-1});
  return DecisionTree(std::move(schema), std::move(nodes), root);
}

void save_tree(const std::string& path, const DecisionTree& tree) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output tree file: " + path);
  out << serialize_tree(tree) << '\n';
  if (!out) throw Error("I/O failure while writing tree file");
}

DecisionTree load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open tree file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_tree(buf.str());
}

}  // namespace helmex
