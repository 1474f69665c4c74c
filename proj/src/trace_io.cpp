#include "helmex/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "helmex/errors.hpp"

namespace helmex {

namespace {

using json = nlohmann::ordered_json;

std::string where(long line_number) {
  return line_number >= 0 ? " (line " + std::to_string(line_number) + ")" : "";
}

[[noreturn]] void fail(const std::string& field, const std::string& reason, long line) {
  throw ParseError("trace field \"" + field + "\": " + reason + where(line));
}

double require_finite_number(const json& obj, const char* key, long line) {
  if (!obj.contains(key)) fail(key, "missing", line);
  const json& v = obj.at(key);
  if (!v.is_number()) fail(key, "expected a number", line);
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(key, "non-finite value", line);
  return d;
}

bool require_bool(const json& obj, const char* key, long line) {
  if (!obj.contains(key)) fail(key, "missing", line);
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(key, "expected a boolean", line);
  return v.get<bool>();
}

constexpr const char* kKeys[] = {
    "t",       "wall",           "x",
    "y",       "depth",          "speed",
    "heading", "battery",        "objective_id",
    "objective_complete",        "obstacle_range",
    "in_exclusion_zone",         "gps_fix_age",
    "behaviour",
};

json state_to_json(const VehicleState& s) {
  json o;
  o["t"] = s.t;
  o["wall"] = to_iso8601(s.wall);
  o["x"] = s.x;
  o["y"] = s.y;
  o["depth"] = s.depth;
  o["speed"] = s.speed;
  o["heading"] = s.heading;
  o["battery"] = s.battery;
  if (s.objective_id)
    o["objective_id"] = *s.objective_id;
  else
    o["objective_id"] = nullptr;
  o["objective_complete"] = s.objective_complete;
  if (std::isinf(s.obstacle_range))
    o["obstacle_range"] = "inf";
  else
    o["obstacle_range"] = s.obstacle_range;
  o["in_exclusion_zone"] = s.in_exclusion_zone;
  o["gps_fix_age"] = s.gps_fix_age;
  return o;
}

StreamRecord record_from_json(const json& o, long line) {
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool known = false;
    for (const char* k : kKeys) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(it.key(), "unknown field", line);
  }

  StreamRecord rec;
  VehicleState& s = rec.state;
  s.t = require_finite_number(o, "t", line);
  if (s.t < 0) fail("t", "must be non-negative", line);
  if (!o.contains("wall") || !o.at("wall").is_string()) fail("wall", "expected a string", line);
  try {
    s.wall = parse_iso8601(o.at("wall").get<std::string>());
  } catch (const ParseError& e) {
    fail("wall", e.what(), line);
  }
  s.x = require_finite_number(o, "x", line);
  s.y = require_finite_number(o, "y", line);
  s.depth = require_finite_number(o, "depth", line);
  if (s.depth < 0) fail("depth", "must be non-negative", line);
  s.speed = require_finite_number(o, "speed", line);
  if (s.speed < 0) fail("speed", "must be non-negative", line);
  s.heading = require_finite_number(o, "heading", line);
  if (s.heading < 0 || s.heading >= 360.0) fail("heading", "must be in [0, 360)", line);
  s.battery = require_finite_number(o, "battery", line);
  if (s.battery < 0 || s.battery > 100.0) fail("battery", "must be in [0, 100]", line);

  if (!o.contains("objective_id")) fail("objective_id", "missing", line);
  if (o.at("objective_id").is_null())
    s.objective_id.reset();
  else if (o.at("objective_id").is_string())
    s.objective_id = o.at("objective_id").get<std::string>();
  else
    fail("objective_id", "expected a string or null", line);

  s.objective_complete = require_bool(o, "objective_complete", line);

  if (!o.contains("obstacle_range")) fail("obstacle_range", "missing", line);
  const json& orange = o.at("obstacle_range");
  if (orange.is_string()) {
    if (orange.get<std::string>() != "inf")
      fail("obstacle_range", "expected a number or \"inf\"", line);
    s.obstacle_range = std::numeric_limits<double>::infinity();
  } else if (orange.is_number()) {
    s.obstacle_range = orange.get<double>();
    if (!std::isfinite(s.obstacle_range) || s.obstacle_range < 0)
      fail("obstacle_range", "must be a non-negative finite number or \"inf\"", line);
  } else {
    fail("obstacle_range", "expected a number or \"inf\"", line);
  }

  s.in_exclusion_zone = require_bool(o, "in_exclusion_zone", line);
  s.gps_fix_age = require_finite_number(o, "gps_fix_age", line);
  if (s.gps_fix_age < 0) fail("gps_fix_age", "must be non-negative", line);

  if (o.contains("behaviour")) {
    if (!o.at("behaviour").is_string()) fail("behaviour", "expected a string", line);
    const std::string label = o.at("behaviour").get<std::string>();
    auto b = behaviour_from_string(label);
    if (!b) fail("behaviour", "unknown behaviour label \"" + label + "\"", line);
    rec.behaviour = *b;
  }
  return rec;
}

json parse_line(std::string_view line, long line_number) {
  json o = json::parse(line, nullptr, false);
  if (o.is_discarded() || !o.is_object())
    throw ParseError("trace line is not a JSON object" + where(line_number));
  return o;
}

template <typename Rec, Rec (*ParseOne)(std::string_view, long)>
std::vector<Rec> read_all(std::istream& source) {
  if (!source) throw Error("trace stream is not readable");
  std::vector<Rec> out;
  std::string line;
  long line_number = 0;
  long prev_line = -1;
  double prev_t = -1.0;
  while (std::getline(source, line)) {
    ++line_number;
    if (line.empty()) continue;
    Rec rec = ParseOne(line, line_number);
    if (prev_line >= 0 && rec.state.t <= prev_t) {
      std::ostringstream msg;
      msg << "timestamp regression: line " << line_number << " (t=" << format_number(rec.state.t)
          << ") does not advance past line " << prev_line << " (t=" << format_number(prev_t)
          << ")";
      throw ParseError(msg.str());
    }
    prev_t = rec.state.t;
    prev_line = line_number;
    out.push_back(std::move(rec));
  }
  if (source.bad()) throw Error("I/O failure while reading trace stream");
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file: " + path);
  return in;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string serialize_stream_record(const StreamRecord& record) {
  json o = state_to_json(record.state);
  if (record.behaviour) o["behaviour"] = std::string(to_string(*record.behaviour));
  return o.dump();
}

std::string serialize_trace_record(const TraceRecord& record) {
  return serialize_stream_record(StreamRecord{record.state, record.behaviour});
}

StreamRecord parse_stream_record(std::string_view line, long line_number) {
  return record_from_json(parse_line(line, line_number), line_number);
}

TraceRecord parse_trace_record(std::string_view line, long line_number) {
  StreamRecord rec = parse_stream_record(line, line_number);
  if (!rec.behaviour)
    throw ParseError("trace field \"behaviour\": missing (record is unlabeled)" +
                     where(line_number));
  return TraceRecord{std::move(rec.state), *rec.behaviour};
}

namespace {
TraceRecord parse_trace_adapter(std::string_view line, long n) {
  return parse_trace_record(line, n);
}
StreamRecord parse_stream_adapter(std::string_view line, long n) {
  return parse_stream_record(line, n);
}
}  // namespace

std::vector<TraceRecord> read_trace(std::istream& source) {
  return read_all<TraceRecord, parse_trace_adapter>(source);
}

std::vector<StreamRecord> read_stream(std::istream& source) {
  return read_all<StreamRecord, parse_stream_adapter>(source);
}

std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_trace(in);
}

std::vector<StreamRecord> read_stream_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_stream(in);
}

void write_trace(std::ostream& sink, const std::vector<TraceRecord>& records) {
  for (const TraceRecord& r : records) sink << serialize_trace_record(r) << '\n';
  if (!sink) throw Error("I/O failure while writing trace");
}

void write_trace_file(const std::string& path, const std::vector<TraceRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output trace file: " + path);
  write_trace(out, records);
}

}  // namespace helmex
