#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helmex/features.hpp"
#include "helmex/vehicle_state.hpp"

namespace helmex {

enum class SplitKind : std::uint8_t { Threshold, Equality };

/// A single state condition. Threshold splits send `number < cutoff`
/// left; equality splits send `category == category value` left.
struct SplitCondition {
  int feature = 0;
  SplitKind kind = SplitKind::Threshold;
  double cutoff = 0.0;
  std::string category;

  bool goes_left(const FeatureValue& v) const {
    return kind == SplitKind::Threshold ? v.number < cutoff : v.category == category;
  }
};

using LabelCounts = std::array<std::int64_t, kBehaviourCount>;

struct TreeNode {
  std::optional<SplitCondition> split;  // nullopt = leaf
  std::int32_t left = -1;
  std::int32_t right = -1;
  LabelCounts counts{};  // leaf label distribution
  Behaviour majority = Behaviour::Wait;

  bool is_leaf() const { return !split.has_value(); }
};

struct FitParams {
  int max_depth = 12;
  int min_samples_leaf = 5;
  double min_impurity_decrease = 1e-7;

  void validate() const;  // throws ConfigError
};

/// Featurized labelled records sharing one schema.
struct TrainingSet {
  const FeatureSchema* schema = &FeatureSchema::standard();
  std::vector<FeatureVector> features;
  std::vector<Behaviour> labels;

  std::size_t size() const { return labels.size(); }
};

/// Featurizes a labelled trace under the standard schema. Throws
/// SchemaMismatchError if record vectors disagree on the fingerprint.
TrainingSet build_training_set(std::span<const TraceRecord> records);

class DecisionTree {
 public:
  DecisionTree(FeatureSchema schema, std::vector<TreeNode> nodes, std::int32_t root);

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::int32_t root() const { return root_; }
  std::uint64_t schema_fingerprint() const { return schema_.fingerprint(); }

  /// Number of splits on the longest root-to-leaf path.
  int depth() const;
  std::size_t leaf_count() const;

 private:
  FeatureSchema schema_;
  std::vector<TreeNode> nodes_;
  std::int32_t root_;
};

/// Gini impurity 1 - sum_k (n_k/N)^2. Throws on an all-zero count set.
double gini(const LabelCounts& counts);
double gini(std::span<const std::int64_t> counts);

/// Exhaustive split search: every midpoint between consecutive distinct
/// values of each numeric feature and every one-vs-rest equality split
/// of each boolean/categorical feature. Returns the split with the
/// largest weighted impurity decrease, or nullopt when the best
/// decrease falls below params.min_impurity_decrease or every candidate
/// would leave a child smaller than params.min_samples_leaf.
/// Ties break to the lowest feature index, then the smallest
/// cutoff/category.
std::optional<SplitCondition> best_split(const TrainingSet& data, const FitParams& params);

/// CART-style recursive partitioning driven by best_split.
/// Deterministic for a fixed record order and parameter set.
DecisionTree fit_tree(const TrainingSet& data, const FitParams& params = {});

struct Prediction {
  Behaviour label;
  double confidence;  // majority count / leaf total, in (0, 1]
};

/// Throws SchemaMismatchError when fingerprints differ.
Prediction predict(const DecisionTree& tree, const FeatureVector& fv);

/// Fraction of records whose predicted label equals the trace label.
double fidelity(const DecisionTree& tree, const TrainingSet& data);
double fidelity(const DecisionTree& tree, std::span<const TraceRecord> records);

/// JSON round-trip. The format carries a version tag, the schema and
/// the node array; floats use shortest round-trip decimals.
std::string serialize_tree(const DecisionTree& tree);
DecisionTree deserialize_tree(std::string_view text);

void save_tree(const std::string& path, const DecisionTree& tree);
DecisionTree load_tree(const std::string& path);

}  // namespace helmex
