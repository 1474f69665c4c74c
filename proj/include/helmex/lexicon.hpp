#pragma once

#include <map>
#include <optional>
#include <string>

#include "helmex/behaviour.hpp"
#include "helmex/features.hpp"

namespace helmex {

/// Phrase book for concept-to-text realization. Loading a lexicon that
/// misses any behaviour, relation or template entry is an error;
/// feature coverage is checked against a schema via ensure_covers().
class Lexicon {
 public:
  struct FeatureEntry {
    std::string phrase;
    std::map<std::string, std::string> values;  // category value -> rendering
  };

  /// The English lexicon shipped with the tool (data/lexicon.json
  /// carries the same content).
  static const Lexicon& defaults();

  static Lexicon from_json(const std::string& text);
  static Lexicon load(const std::string& path);

  const std::string& behaviour_phrase(Behaviour b) const;
  const FeatureEntry& feature_entry(const std::string& feature) const;
  const std::string& relation_phrase(std::string_view relation) const;
  const std::string& event_template() const { return event_template_; }
  const std::string& event_no_cause_template() const { return event_no_cause_template_; }
  const std::string& stale_marker() const { return stale_marker_; }

  /// Throws LexiconError unless every schema feature has an entry.
  void ensure_covers(const FeatureSchema& schema) const;

 private:
  std::map<std::string, std::string> behaviours_;
  std::map<std::string, FeatureEntry> features_;
  std::map<std::string, std::string> relations_;
  std::string event_template_;
  std::string event_no_cause_template_;
  std::string stale_marker_;
};

}  // namespace helmex
