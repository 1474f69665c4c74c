#include "helmex/behaviour.hpp"

#include <string>

#include "helmex/errors.hpp"

namespace helmex {

std::string_view to_string(Behaviour b) {
  switch (b) {
    case Behaviour::Goto:
      return "goto";
    case Behaviour::Transit:
      return "transit";
    case Behaviour::Survey:
      return "survey";
    case Behaviour::Wait:
      return "wait";
    case Behaviour::Gps:
      return "gps";
    case Behaviour::AvoidObstacles:
      return "avoid-obstacles";
  }
  return "?";
}

std::optional<Behaviour> behaviour_from_string(std::string_view name) {
  for (Behaviour b : kAllBehaviours) {
    if (to_string(b) == name) return b;
  }
  return std::nullopt;
}

Behaviour parse_behaviour(std::string_view name) {
  if (auto b = behaviour_from_string(name)) return *b;
  throw ParseError("unknown behaviour label: \"" + std::string(name) + "\"");
}

}  // namespace helmex
