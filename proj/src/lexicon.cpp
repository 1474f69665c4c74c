#include "helmex/lexicon.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "helmex/errors.hpp"

namespace helmex {

namespace {

// Kept byte-identical with data/lexicon.json (asserted by tests).
constexpr const char* kDefaultLexicon = R"json({
  "behaviours": {
    "goto": "moving to the target point",
    "transit": "transiting to the next waypoint",
    "survey": "surveying the designated area",
    "wait": "holding position",
    "gps": "surfacing for a GPS fix",
    "avoid-obstacles": "avoiding an obstacle"
  },
  "features": {
    "battery": {"phrase": "the battery level"},
    "depth": {"phrase": "the vehicle depth"},
    "speed": {"phrase": "the speed over ground"},
    "obstacle_range": {"phrase": "the distance to the nearest obstacle"},
    "gps_fix_age": {"phrase": "the time since the last GPS fix"},
    "objective_complete": {
      "phrase": "the active objective",
      "values": {"1": "complete", "0": "incomplete"}
    },
    "in_exclusion_zone": {
      "phrase": "the vehicle",
      "values": {"1": "inside an exclusion zone", "0": "outside exclusion zones"}
    },
    "objective_id": {
      "phrase": "the active objective",
      "values": {"": "none"}
    }
  },
  "relations": {
    "<": "is below",
    ">=": "is at least",
    "==": "is",
    "!=": "is not"
  },
  "templates": {
    "event": "At {time}, the vehicle switched to {behaviour} because {conditions}.",
    "event_no_cause": "At {time}, the vehicle switched to {behaviour} as the default behaviour.",
    "condition_interrogative": "was {feature} {relation} {value}?"
  },
  "stale_marker": "(last known value)"
}
)json";

using json = nlohmann::json;

const json& member(const json& o, const char* key) {
  if (!o.contains(key)) throw LexiconError(std::string("lexicon is missing \"") + key + "\"");
  return o.at(key);
}

}  // namespace

Lexicon Lexicon::from_json(const std::string& text) {
  const json o = json::parse(text, nullptr, false);
  if (o.is_discarded() || !o.is_object()) throw LexiconError("lexicon is not a JSON object");

  Lexicon lex;
  for (const auto& [label, phrase] : member(o, "behaviours").items()) {
    if (!behaviour_from_string(label))
      throw LexiconError("lexicon behaviours: unknown label \"" + label + "\"");
    lex.behaviours_[label] = phrase.get<std::string>();
  }
  for (Behaviour b : kAllBehaviours) {
    if (!lex.behaviours_.count(std::string(to_string(b))))
      throw LexiconError("lexicon behaviours: missing entry for \"" +
                         std::string(to_string(b)) + "\"");
  }

  for (const auto& [name, entry] : member(o, "features").items()) {
    FeatureEntry fe;
    fe.phrase = member(entry, "phrase").get<std::string>();
    if (entry.contains("values")) {
      for (const auto& [value, rendering] : entry.at("values").items())
        fe.values[value] = rendering.get<std::string>();
    }
    lex.features_[name] = std::move(fe);
  }

  for (const auto& [rel, phrase] : member(o, "relations").items())
    lex.relations_[rel] = phrase.get<std::string>();
  for (const char* rel : {"<", ">=", "==", "!="}) {
    if (!lex.relations_.count(rel))
      throw LexiconError(std::string("lexicon relations: missing entry for \"") + rel + "\"");
  }

  const json& templates = member(o, "templates");
  lex.event_template_ = member(templates, "event").get<std::string>();
  lex.event_no_cause_template_ = member(templates, "event_no_cause").get<std::string>();
  lex.stale_marker_ = member(o, "stale_marker").get<std::string>();
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LexiconError("cannot open lexicon file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

const Lexicon& Lexicon::defaults() {
  static const Lexicon lex = from_json(kDefaultLexicon);
  return lex;
}

const std::string& Lexicon::behaviour_phrase(Behaviour b) const {
  return behaviours_.at(std::string(to_string(b)));
}

const Lexicon::FeatureEntry& Lexicon::feature_entry(const std::string& feature) const {
  auto it = features_.find(feature);
  if (it == features_.end())
    throw LexiconError("lexicon has no entry for feature \"" + feature + "\"");
  return it->second;
}

const std::string& Lexicon::relation_phrase(std::string_view relation) const {
  auto it = relations_.find(std::string(relation));
  if (it == relations_.end())
    throw LexiconError("lexicon has no entry for relation \"" + std::string(relation) + "\"");
  return it->second;
}

void Lexicon::ensure_covers(const FeatureSchema& schema) const {
  for (const FeatureSpec& f : schema.specs()) {
    if (!features_.count(f.name))
      throw LexiconError("lexicon has no entry for feature \"" + f.name + "\"");
  }
}

}  // namespace helmex
