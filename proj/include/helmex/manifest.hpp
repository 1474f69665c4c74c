#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace helmex {

/// Reproducibility sidecar written next to every file a run produces,
/// at "<output>.manifest.json".
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string output;
  std::map<std::string, std::string> overrides;  // flag/config overrides in effect
  std::uint64_t seed = 0;
  bool seed_set = false;
  int exit_status = 0;
  double wall_time_s = 0.0;
  std::map<std::string, std::string> extra;  // per-command facts (record counts, ...)

  std::string to_json() const;
  void write() const;  // writes alongside `output`
};

}  // namespace helmex
