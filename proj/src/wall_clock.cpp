#include "helmex/wall_clock.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "helmex/errors.hpp"

namespace helmex {

namespace {

// Civil/serial date conversions (proleptic Gregorian, epoch 1970-01-01).
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

WallTime advance(WallTime base, double seconds) {
  return WallTime{base.millis + static_cast<std::int64_t>(std::llround(seconds * 1000.0))};
}

std::string to_iso8601(WallTime t) {
  const std::int64_t days = floor_div(t.millis, 86400000);
  std::int64_t rem = t.millis - days * 86400000;
  std::int64_t y;
  unsigned mo, d;
  civil_from_days(days, y, mo, d);
  const int h = static_cast<int>(rem / 3600000);
  rem %= 3600000;
  const int mi = static_cast<int>(rem / 60000);
  rem %= 60000;
  const int s = static_cast<int>(rem / 1000);
  const int ms = static_cast<int>(rem % 1000);
  char buf[40];
  if (ms == 0) {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<long long>(y), mo, d, h, mi, s);
  } else {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<long long>(y), mo, d, h, mi, s, ms);
  }
  return buf;
}

WallTime parse_iso8601(std::string_view text) {
  const std::string s(text);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, ms = 0;
  int consumed = 0;
  bool ok = false;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ%n", &y, &mo, &d, &h, &mi,
                  &sec, &ms, &consumed) == 7 &&
      consumed == static_cast<int>(s.size())) {
    ok = true;
  } else if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2dZ%n", &y, &mo, &d, &h, &mi,
                         &sec, &consumed) == 6 &&
             consumed == static_cast<int>(s.size())) {
    ms = 0;
    ok = true;
  }
  if (!ok || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60) {
    throw ParseError("invalid ISO 8601 UTC timestamp: \"" + s + "\"");
  }
  const std::int64_t days = days_from_civil(y, mo, d);
  return WallTime{((days * 24 + h) * 60 + mi) * 60000 + sec * 1000LL + ms};
}

}  // namespace helmex
