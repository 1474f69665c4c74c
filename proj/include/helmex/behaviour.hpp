#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace helmex {

/// The closed set of behaviours a vehicle helm can activate.
enum class Behaviour : std::uint8_t {
  Goto = 0,
  Transit,
  Survey,
  Wait,
  Gps,
  AvoidObstacles,
};

inline constexpr std::size_t kBehaviourCount = 6;

inline constexpr std::array<Behaviour, kBehaviourCount> kAllBehaviours{
    Behaviour::Goto,   Behaviour::Transit, Behaviour::Survey,
    Behaviour::Wait,   Behaviour::Gps,     Behaviour::AvoidObstacles,
};

std::string_view to_string(Behaviour b);

/// Returns std::nullopt for anything outside the six known labels.
std::optional<Behaviour> behaviour_from_string(std::string_view name);

/// Like behaviour_from_string but throws ParseError on unknown labels.
Behaviour parse_behaviour(std::string_view name);

}  // namespace helmex
