#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "helmex/vehicle_state.hpp"

namespace helmex {

/// Canonical one-line JSON rendering of a record. Fixed key order
/// (t, wall, x, y, depth, speed, heading, battery, objective_id,
/// objective_complete, obstacle_range, in_exclusion_zone, gps_fix_age,
/// behaviour), compact separators, shortest round-trip floats.
/// obstacle_range serializes as the literal string "inf" when infinite.
std::string serialize_trace_record(const TraceRecord& record);
std::string serialize_stream_record(const StreamRecord& record);

/// Parses one trace line. The behaviour field is required here;
/// use parse_stream_record for unlabeled inference streams.
/// line_number, when >= 0, is included in error messages.
TraceRecord parse_trace_record(std::string_view line, long line_number = -1);
StreamRecord parse_stream_record(std::string_view line, long line_number = -1);

/// Reads newline-delimited labelled records in file order and verifies
/// strictly increasing timestamps (a regression error names both lines).
std::vector<TraceRecord> read_trace(std::istream& source);
std::vector<TraceRecord> read_trace_file(const std::string& path);

/// Same, but tolerates missing behaviour fields.
std::vector<StreamRecord> read_stream(std::istream& source);
std::vector<StreamRecord> read_stream_file(const std::string& path);

void write_trace(std::ostream& sink, const std::vector<TraceRecord>& records);
void write_trace_file(const std::string& path, const std::vector<TraceRecord>& records);

/// Shortest decimal text that round-trips to the same double; integral
/// values print without a decimal point ("29", "300.5", "1e+09").
std::string format_number(double v);

}  // namespace helmex
