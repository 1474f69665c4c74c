#include "helmex/features.hpp"

#include <cmath>

#include "helmex/errors.hpp"

namespace helmex {

std::string_view to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::Numeric:
      return "numeric";
    case FeatureKind::Boolean:
      return "boolean";
    case FeatureKind::Categorical:
      return "categorical";
  }
  return "?";
}

FeatureKind feature_kind_from_string(std::string_view name) {
  if (name == "numeric") return FeatureKind::Numeric;
  if (name == "boolean") return FeatureKind::Boolean;
  if (name == "categorical") return FeatureKind::Categorical;
  throw ParseError("unknown feature kind: \"" + std::string(name) + "\"");
}

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> specs) : specs_(std::move(specs)) {
  std::uint64_t h = 14695981039346656037ull;
  for (const FeatureSpec& f : specs_) {
    h = fnv1a(f.name, h);
    h = fnv1a("\x1f", h);
    h = fnv1a(to_string(f.kind), h);
    h = fnv1a("\x1f", h);
    h = fnv1a(f.unit, h);
    h = fnv1a("\x1e", h);
  }
  fingerprint_ = h;
}

const FeatureSchema& FeatureSchema::standard() {
  static const FeatureSchema schema({
      {"battery", FeatureKind::Numeric, "%"},
      {"depth", FeatureKind::Numeric, "m"},
      {"speed", FeatureKind::Numeric, "m/s"},
      {"obstacle_range", FeatureKind::Numeric, "m"},
      {"gps_fix_age", FeatureKind::Numeric, "s"},
      {"objective_complete", FeatureKind::Boolean, ""},
      {"in_exclusion_zone", FeatureKind::Boolean, ""},
      {"objective_id", FeatureKind::Categorical, ""},
  });
  return schema;
}

int FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

FeatureVector featurize(const VehicleState& state) {
  const FeatureSchema& schema = FeatureSchema::standard();
  FeatureVector fv;
  fv.schema_fingerprint = schema.fingerprint();
  fv.values.resize(schema.size());

  auto boolean = [](bool v) {
    FeatureValue fval;
    fval.number = v ? 1.0 : 0.0;
    fval.category = v ? "1" : "0";
    return fval;
  };

  fv.values[0].number = state.battery;
  fv.values[1].number = state.depth;
  fv.values[2].number = state.speed;
  fv.values[3].number =
      std::isinf(state.obstacle_range) ? kObstacleRangeSentinel : state.obstacle_range;
  fv.values[4].number = state.gps_fix_age;
  fv.values[5] = boolean(state.objective_complete);
  fv.values[6] = boolean(state.in_exclusion_zone);
  fv.values[7].category = state.objective_id.value_or("");
  return fv;
}

}  // namespace helmex
