#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ries/config.hpp"

namespace ries {

// One-at-a-time sweep definition: a single config field varied over a
// physical range, everything else held at the base configuration.
struct SweepSpec {
  std::string id;     // stable handle, F1..F27 for the standard set
  std::string field;  // dotted config path the sweep mutates
  std::string label;
  double lo = 0.0;
  double hi = 0.0;
  int samples = 11;
  std::function<void(SystemConfig&, double)> apply;
};

// The standard 27-parameter roster. Ranges are plausible engineering bands
// around the bundled values; each id touches exactly one config field.
std::vector<SweepSpec> standard_sweeps();

struct SweepSample {
  double value = 0.0;       // physical value handed to `apply`
  double normalized = 0.0;  // (value - lo) / (hi - lo)
  bool feasible = false;    // dispatch solved to optimality
  double emissions_kg = 0.0;  // valid only when feasible
};

struct ParamResult {
  std::string id, field, label;
  double lo = 0.0, hi = 0.0;
  std::vector<SweepSample> samples;
  int feasible_count = 0;
  bool degenerate = false;  // zero variance or too few feasible points
  double pearson_r = 0.0;   // valid only when !degenerate
  double spread_kg = 0.0;   // max - min emissions over feasible samples
  double score = 0.0;       // |r| * spread; 0 when degenerate
  std::string sens_class;   // "High" | "Low"
  int rank = 0;             // 1 = largest score
};

struct SensitivityReport {
  double base_emissions_kg = 0.0;
  std::vector<ParamResult> params;  // roster order, rank field gives ordering
};

// Product-moment correlation. Throws std::invalid_argument when fewer than
// 3 points or length mismatch; nullopt when either variance vanishes.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

// Runs one sweep: n equally spaced samples over [lo, hi], each re-derived
// and dispatched under scenario 4 with the config's own tariff. Infeasible
// samples stay in the table marked infeasible; emissions are never imputed.
ParamResult sweep(const SweepSpec& spec, const SystemConfig& base);

// Full study. `ids` filters the standard roster (empty = all 27);
// `samples_override` > 0 replaces each spec's sample count.
SensitivityReport run_sensitivity(const SystemConfig& base,
                                  const std::vector<std::string>& ids = {},
                                  int samples_override = 0);

}  // namespace ries
