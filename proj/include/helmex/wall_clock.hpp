#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace helmex {

/// A UTC wall-clock instant with millisecond resolution.
struct WallTime {
  std::int64_t millis = 0;  // milliseconds since the Unix epoch

  friend bool operator==(WallTime a, WallTime b) { return a.millis == b.millis; }
  friend bool operator!=(WallTime a, WallTime b) { return a.millis != b.millis; }
};

/// Adds a (possibly fractional) number of seconds to an instant,
/// rounding to the nearest millisecond.
WallTime advance(WallTime base, double seconds);

/// Canonical rendering: "YYYY-MM-DDTHH:MM:SSZ", with ".mmm" inserted
/// before the Z only when the instant has a sub-second component.
std::string to_iso8601(WallTime t);

/// Accepts the canonical form, with or without fractional seconds.
/// Throws ParseError otherwise.
WallTime parse_iso8601(std::string_view text);

}  // namespace helmex
