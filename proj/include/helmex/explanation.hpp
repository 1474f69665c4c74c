#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helmex/decision_tree.hpp"

namespace helmex {

struct TraversalStep {
  SplitCondition split;
  bool went_left = false;
};

/// The root-to-leaf path a state took through the distilled tree,
/// together with the prediction it reached.
struct TraversalPath {
  std::vector<TraversalStep> steps;
  std::int32_t leaf = -1;
  Behaviour label = Behaviour::Wait;
  double confidence = 1.0;
  std::vector<bool> stale;  // per-feature staleness of the traversed vector
};

/// Records every split and branch taken. Prediction and confidence
/// equal predict()'s output for the same vector.
TraversalPath traverse(const DecisionTree& tree, const FeatureVector& fv);

enum class Relation : std::uint8_t { Less, GreaterEqual, Equal, NotEqual };

std::string_view to_string(Relation r);

/// One human-facing split condition: "battery < 30 %".
struct Condition {
  std::string feature;
  Relation relation = Relation::Less;
  double number = 0.0;     // numeric conditions
  std::string category;    // equality conditions
  std::string unit;
  bool numeric = true;
  bool stale = false;

  friend bool operator==(const Condition&, const Condition&) = default;
};

/// Collapses the raw path into an equivalent condition list: per
/// numeric feature at most one lower (>=) and one upper (<) bound; per
/// boolean/categorical feature a single == or the set of !=. Output is
/// ordered by first appearance in the path. Throws on contradictory
/// bounds, which a well-formed tree cannot produce.
std::vector<Condition> simplify_path(const TraversalPath& path, const FeatureSchema& schema);

/// The explanation payload: (behaviour, causality, time).
struct ConceptSet {
  Behaviour behaviour = Behaviour::Wait;
  std::vector<Condition> causality;
  double t = 0.0;
  WallTime wall{};
  double confidence = 1.0;
};

ConceptSet extract_concept_set(const TraversalPath& path, const VehicleState& state,
                               const FeatureSchema& schema);

enum class EventTrigger : std::uint8_t { MissionStart, BehaviourChange };

std::string_view to_string(EventTrigger t);

struct ExplanationEvent {
  ConceptSet concept_set;
  std::optional<Behaviour> previous;  // nullopt iff trigger is MissionStart
  EventTrigger trigger = EventTrigger::MissionStart;
  std::optional<std::string> sentence;  // filled when a verbalizer is attached
};

/// Stateful fold over one ordered stream: emits an event at the first
/// tick and whenever the predicted behaviour changes. min_dwell > 1
/// requires the new prediction to persist that many consecutive ticks
/// before the change is committed (the event still carries the first
/// tick of the new run).
class EventDetector {
 public:
  explicit EventDetector(const DecisionTree& tree, int min_dwell = 1);

  std::optional<ExplanationEvent> push(const VehicleState& state, const FeatureVector& fv);
  std::optional<ExplanationEvent> push(const VehicleState& state);

 private:
  const DecisionTree* tree_;
  int min_dwell_;
  bool started_ = false;
  double last_t_ = 0.0;
  Behaviour committed_ = Behaviour::Wait;
  std::optional<Behaviour> pending_;
  int pending_ticks_ = 0;
  ConceptSet pending_concept_;
};

/// Replays a whole state sequence through a detector.
std::vector<ExplanationEvent> detect_events(std::span<const VehicleState> states,
                                            const DecisionTree& tree, int min_dwell = 1);

/// Marks features whose last update is older than max_age as stale.
/// Traversal proceeds on the last-known values; only annotations change.
FeatureVector staleness_guard(FeatureVector fv, std::span<const double> last_update_ages,
                              double max_age);

/// JSON-lines rendering of one event (the explain stream format).
std::string event_to_json(const ExplanationEvent& event);

}  // namespace helmex
