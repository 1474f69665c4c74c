#include "helmex/verbalizer.hpp"

#include <cmath>
#include <cstdio>

#include "helmex/errors.hpp"
#include "helmex/trace_io.hpp"

namespace helmex {

namespace {

std::string render_value(const Condition& c, const Lexicon& lex) {
  if (c.numeric) {
    std::string text = format_number(c.number);
    if (!c.unit.empty()) text += " " + c.unit;
    return text;
  }
  const auto& entry = lex.feature_entry(c.feature);
  auto it = entry.values.find(c.category);
  return it != entry.values.end() ? it->second : c.category;
}

/// Replaces every "{name}" in the template, recording slot fills.
std::string fill(const std::string& tmpl,
                 const std::vector<std::pair<std::string, std::string>>& fillers,
                 std::vector<std::pair<std::string, std::string>>* slots) {
  std::string out = tmpl;
  for (const auto& [name, value] : fillers) {
    const std::string token = "{" + name + "}";
    std::size_t pos = 0;
    while ((pos = out.find(token, pos)) != std::string::npos) {
      out.replace(pos, token.size(), value);
      pos += value.size();
      if (slots) slots->emplace_back(name, value);
    }
  }
  return out;
}

}  // namespace

std::string format_time(double mission_seconds, WallTime wall, TimeMode mode) {
  if (mode == TimeMode::Wall) return to_iso8601(wall);
  const long long total = static_cast<long long>(std::floor(mission_seconds));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", total / 3600, (total / 60) % 60,
                total % 60);
  return buf;
}

std::string realize_condition(const Condition& c, const Lexicon& lex) {
  const auto& entry = lex.feature_entry(c.feature);
  std::string text = entry.phrase + " " + lex.relation_phrase(to_string(c.relation)) + " " +
                     render_value(c, lex);
  if (c.stale) text += " " + lex.stale_marker();
  return text;
}

Sentence realize(const ConceptSet& concept_set, const Lexicon& lexicon, TimeMode mode) {
  Sentence sentence;
  const std::string time_text = format_time(concept_set.t, concept_set.wall, mode);
  const std::string behaviour_text = lexicon.behaviour_phrase(concept_set.behaviour);

  if (concept_set.causality.empty()) {
    sentence.text = fill(lexicon.event_no_cause_template(),
                         {{"time", time_text}, {"behaviour", behaviour_text}}, &sentence.slots);
    return sentence;
  }

  std::string conditions_text;
  for (std::size_t i = 0; i < concept_set.causality.size(); ++i) {
    if (i > 0) conditions_text += (i + 1 == concept_set.causality.size()) ? " and " : ", ";
    const std::string phrase = realize_condition(concept_set.causality[i], lexicon);
    sentence.slots.emplace_back("conditions[" + std::to_string(i) + "]", phrase);
    conditions_text += phrase;
  }
  sentence.text = fill(
      lexicon.event_template(),
      {{"time", time_text}, {"behaviour", behaviour_text}, {"conditions", conditions_text}},
      &sentence.slots);
  return sentence;
}

}  // namespace helmex
