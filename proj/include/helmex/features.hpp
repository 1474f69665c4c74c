#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "helmex/vehicle_state.hpp"

namespace helmex {

enum class FeatureKind : std::uint8_t { Numeric, Boolean, Categorical };

std::string_view to_string(FeatureKind k);
FeatureKind feature_kind_from_string(std::string_view name);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  std::string unit;  // empty for unitless features
};

/// Fixed, ordered feature layout shared by training and inference.
/// Two vectors are only comparable under the same fingerprint.
class FeatureSchema {
 public:
  explicit FeatureSchema(std::vector<FeatureSpec> specs);

  /// The distillation schema used throughout the pipeline: battery,
  /// depth, speed, obstacle_range, gps_fix_age, objective_complete,
  /// in_exclusion_zone, objective_id. Raw x/y position and heading are
  /// deliberately not part of it.
  static const FeatureSchema& standard();

  std::size_t size() const { return specs_.size(); }
  const FeatureSpec& at(std::size_t i) const { return specs_.at(i); }
  const std::vector<FeatureSpec>& specs() const { return specs_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  /// Index of the named feature, or -1.
  int index_of(std::string_view name) const;

 private:
  std::vector<FeatureSpec> specs_;
  std::uint64_t fingerprint_ = 0;
};

/// One cell of a FeatureVector. Numeric features use `number`;
/// boolean features mirror their 0/1 encoding into `category` ("0"/"1")
/// and categorical features carry the category string (empty = none).
struct FeatureValue {
  double number = 0.0;
  std::string category;
  bool stale = false;  // set by the staleness guard, never by featurize

  friend bool operator==(const FeatureValue& a, const FeatureValue& b) {
    return a.number == b.number && a.category == b.category;
  }
};

struct FeatureVector {
  std::uint64_t schema_fingerprint = 0;
  std::vector<FeatureValue> values;

  friend bool operator==(const FeatureVector& a, const FeatureVector& b) {
    return a.schema_fingerprint == b.schema_fingerprint && a.values == b.values;
  }
};

/// When no obstacle is detected the +infinity range is encoded as this
/// large finite sentinel so threshold splits stay well-defined.
inline constexpr double kObstacleRangeSentinel = 1.0e9;

/// Deterministic encoding of a state under the standard schema.
FeatureVector featurize(const VehicleState& state);

}  // namespace helmex
