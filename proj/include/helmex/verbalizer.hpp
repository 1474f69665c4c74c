#pragma once

#include <string>
#include <utility>
#include <vector>

#include "helmex/explanation.hpp"
#include "helmex/lexicon.hpp"

namespace helmex {

enum class TimeMode : std::uint8_t { Mission, Wall };

/// mission mode: "HH:MM:SS" from whole mission seconds (floored);
/// wall mode: the ISO 8601 UTC instant.
std::string format_time(double mission_seconds, WallTime wall, TimeMode mode);

/// A realized sentence plus the slot fillers it was assembled from,
/// for traceability back to the concept set.
struct Sentence {
  std::string text;
  std::vector<std::pair<std::string, std::string>> slots;  // (slot name, source value)
};

/// "the battery level is below 30 %"; stale conditions get the lexicon's
/// stale marker appended.
std::string realize_condition(const Condition& condition, const Lexicon& lexicon);

/// Deterministic template realization of a concept set. Conditions are
/// joined with ", " and a final " and "; an empty causality renders via
/// the default-behaviour template.
Sentence realize(const ConceptSet& concept_set, const Lexicon& lexicon,
                 TimeMode mode = TimeMode::Mission);

}  // namespace helmex
