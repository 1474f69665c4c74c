#include "helmex/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "helmex/errors.hpp"

namespace helmex {

std::string RunManifest::to_json() const {
  nlohmann::ordered_json o;
  o["subcommand"] = subcommand;
  o["inputs"] = inputs;
  o["output"] = output;
  o["overrides"] = overrides;
  if (seed_set)
    o["seed"] = seed;
  else
    o["seed"] = nullptr;
  o["exit_status"] = exit_status;
  o["wall_time_s"] = wall_time_s;
  o["extra"] = extra;
  return o.dump(2);
}

void RunManifest::write() const {
  const std::string path = output + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest: " + path);
  out << to_json() << '\n';
  if (!out) throw Error("I/O failure while writing manifest: " + path);
}

}  // namespace helmex
