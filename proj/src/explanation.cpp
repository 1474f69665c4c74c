#include "helmex/explanation.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "helmex/errors.hpp"
#include "helmex/trace_io.hpp"

namespace helmex {

namespace {

using ordered_json = nlohmann::ordered_json;

struct NumericBounds {
  std::optional<double> lower;  // from right branches: value >= cutoff
  std::optional<double> upper;  // from left branches: value < cutoff
  bool stale = false;
};

struct CategoryFacts {
  std::optional<std::string> equal;      // a taken == branch
  std::vector<std::string> not_equal;    // taken != branches, in path order
  bool stale = false;
};

}  // namespace

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Less:
      return "<";
    case Relation::GreaterEqual:
      return ">=";
    case Relation::Equal:
      return "==";
    case Relation::NotEqual:
      return "!=";
  }
  return "?";
}

std::string_view to_string(EventTrigger t) {
  return t == EventTrigger::MissionStart ? "mission_start" : "behaviour_change";
}

TraversalPath traverse(const DecisionTree& tree, const FeatureVector& fv) {
  // Reuse predict's fingerprint check, then walk recording branches.
  const Prediction pred = predict(tree, fv);
  TraversalPath path;
  path.stale.resize(fv.values.size(), false);
  for (std::size_t i = 0; i < fv.values.size(); ++i) path.stale[i] = fv.values[i].stale;

  std::int32_t idx = tree.root();
  const auto& nodes = tree.nodes();
  while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
    const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
    const FeatureValue& v = fv.values[static_cast<std::size_t>(node.split->feature)];
    const bool left = node.split->goes_left(v);
    path.steps.push_back(TraversalStep{*node.split, left});
    idx = left ? node.left : node.right;
  }
  path.leaf = idx;
  path.label = pred.label;
  path.confidence = pred.confidence;
  return path;
}

std::vector<Condition> simplify_path(const TraversalPath& path, const FeatureSchema& schema) {
  std::map<int, NumericBounds> bounds;
  std::map<int, CategoryFacts> categories;
  std::vector<int> order;  // features by first appearance

  for (const TraversalStep& step : path.steps) {
    const int f = step.split.feature;
    if (f < 0 || f >= static_cast<int>(schema.size()))
      throw Error("traversal step references a feature outside the schema");
    const bool stale =
        static_cast<std::size_t>(f) < path.stale.size() && path.stale[static_cast<std::size_t>(f)];
    if (step.split.kind == SplitKind::Threshold) {
      auto [it, fresh] = bounds.try_emplace(f);
      if (fresh) order.push_back(f);
      NumericBounds& b = it->second;
      b.stale = b.stale || stale;
      if (step.went_left) {
        // value < cutoff: keep the tightest upper bound.
        if (!b.upper || step.split.cutoff < *b.upper) b.upper = step.split.cutoff;
      } else {
        if (!b.lower || step.split.cutoff > *b.lower) b.lower = step.split.cutoff;
      }
    } else {
      auto [it, fresh] = categories.try_emplace(f);
      if (fresh) order.push_back(f);
      CategoryFacts& c = it->second;
      c.stale = c.stale || stale;
      if (step.went_left) {
        c.equal = step.split.category;
      } else if (std::find(c.not_equal.begin(), c.not_equal.end(), step.split.category) ==
                 c.not_equal.end()) {
        c.not_equal.push_back(step.split.category);
      }
    }
  }

  std::vector<Condition> out;
  for (int f : order) {
    const FeatureSpec& spec = schema.at(static_cast<std::size_t>(f));
    if (auto it = bounds.find(f); it != bounds.end()) {
      const NumericBounds& b = it->second;
      if (b.lower && b.upper && *b.lower >= *b.upper) {
        std::ostringstream msg;
        msg << "contradictory bounds on feature \"" << spec.name << "\": >= "
            << format_number(*b.lower) << " and < " << format_number(*b.upper)
            << " (tree is corrupt)";
        throw Error(msg.str());
      }
      if (b.lower) {
        Condition c;
        c.feature = spec.name;
        c.relation = Relation::GreaterEqual;
        c.number = *b.lower;
        c.unit = spec.unit;
        c.numeric = true;
        c.stale = b.stale;
        out.push_back(std::move(c));
      }
      if (b.upper) {
        Condition c;
        c.feature = spec.name;
        c.relation = Relation::Less;
        c.number = *b.upper;
        c.unit = spec.unit;
        c.numeric = true;
        c.stale = b.stale;
        out.push_back(std::move(c));
      }
    } else {
      const CategoryFacts& cf = categories.at(f);
      if (cf.equal) {
        Condition c;
        c.feature = spec.name;
        c.relation = Relation::Equal;
        c.category = *cf.equal;
        c.unit = spec.unit;
        c.numeric = false;
        c.stale = cf.stale;
        out.push_back(std::move(c));
      } else {
        for (const std::string& cat : cf.not_equal) {
          Condition c;
          c.feature = spec.name;
          c.relation = Relation::NotEqual;
          c.category = cat;
          c.unit = spec.unit;
          c.numeric = false;
          c.stale = cf.stale;
          out.push_back(std::move(c));
        }
      }
    }
  }
  return out;
}

ConceptSet extract_concept_set(const TraversalPath& path, const VehicleState& state,
                               const FeatureSchema& schema) {
  ConceptSet cs;
  cs.behaviour = path.label;
  cs.causality = simplify_path(path, schema);
  cs.t = state.t;
  cs.wall = state.wall;
  cs.confidence = path.confidence;
  return cs;
}

EventDetector::EventDetector(const DecisionTree& tree, int min_dwell)
    : tree_(&tree), min_dwell_(std::max(1, min_dwell)) {}

std::optional<ExplanationEvent> EventDetector::push(const VehicleState& state,
                                                    const FeatureVector& fv) {
  if (started_ && state.t <= last_t_) {
    std::ostringstream msg;
    msg << "timestamp regression in event stream: t=" << format_number(state.t)
        << " after t=" << format_number(last_t_);
    throw Error(msg.str());
  }
  last_t_ = state.t;

  const TraversalPath path = traverse(*tree_, fv);

  if (!started_) {
    started_ = true;
    committed_ = path.label;
    pending_.reset();
    ExplanationEvent ev;
    ev.concept_set = extract_concept_set(path, state, tree_->schema());
    ev.previous = std::nullopt;
    ev.trigger = EventTrigger::MissionStart;
    return ev;
  }

  if (path.label == committed_) {
    pending_.reset();
    pending_ticks_ = 0;
    return std::nullopt;
  }

  if (!pending_ || *pending_ != path.label) {
    pending_ = path.label;
    pending_ticks_ = 1;
    pending_concept_ = extract_concept_set(path, state, tree_->schema());
  } else {
    ++pending_ticks_;
  }

  if (pending_ticks_ < min_dwell_) return std::nullopt;

  ExplanationEvent ev;
  ev.concept_set = pending_concept_;
  ev.previous = committed_;
  ev.trigger = EventTrigger::BehaviourChange;
  committed_ = *pending_;
  pending_.reset();
  pending_ticks_ = 0;
  return ev;
}

std::optional<ExplanationEvent> EventDetector::push(const VehicleState& state) {
  return push(state, featurize(state));
}

std::vector<ExplanationEvent> detect_events(std::span<const VehicleState> states,
                                            const DecisionTree& tree, int min_dwell) {
  EventDetector detector(tree, min_dwell);
  std::vector<ExplanationEvent> events;
  for (const VehicleState& s : states) {
    if (auto ev = detector.push(s)) events.push_back(std::move(*ev));
  }
  return events;
}

FeatureVector staleness_guard(FeatureVector fv, std::span<const double> last_update_ages,
                              double max_age) {
  for (double age : last_update_ages) {
    if (age < 0) throw Error("staleness guard: feature ages must be non-negative");
  }
  for (std::size_t i = 0; i < fv.values.size() && i < last_update_ages.size(); ++i) {
    fv.values[i].stale = last_update_ages[i] > max_age;
  }
  return fv;
}

std::string event_to_json(const ExplanationEvent& event) {
  ordered_json o;
  o["t"] = event.concept_set.t;
  o["wall"] = to_iso8601(event.concept_set.wall);
  o["behaviour"] = std::string(to_string(event.concept_set.behaviour));
  if (event.previous)
    o["previous"] = std::string(to_string(*event.previous));
  else
    o["previous"] = nullptr;
  o["trigger"] = std::string(to_string(event.trigger));
  o["confidence"] = event.concept_set.confidence;
  ordered_json conditions = ordered_json::array();
  for (const Condition& c : event.concept_set.causality) {
    ordered_json jc;
    jc["feature"] = c.feature;
    jc["relation"] = std::string(to_string(c.relation));
    if (c.numeric)
      jc["value"] = c.number;
    else
      jc["value"] = c.category;
    jc["unit"] = c.unit;
    jc["stale"] = c.stale;
    conditions.push_back(std::move(jc));
  }
  o["conditions"] = std::move(conditions);
  if (event.sentence)
    o["sentence"] = *event.sentence;
  else
    o["sentence"] = nullptr;
  return o.dump();
}

}  // namespace helmex
