#pragma once
#include <string>
#include <vector>

#include "ries/common.hpp"

namespace ries {

enum class SurplusCredit { None, FlatBeta };
// Carbon charge applied when the tiered market is disabled.
enum class CarbonBaseline { Flat, None };

struct CarbonParams {
  double base_price = 0.3;   // yuan/kg at the first tier
  double interval = 2000.0;  // tier width, kg
  double escalation = 0.25;  // price growth per tier
  double grid_ef_kg_kwh = 0.78;  // purchased-electricity emission factor
  double gas_ef_kg_nm3 = 2.0;    // pipeline-gas combustion factor
  double quota_elec = 0.728;     // free allowance per purchased kWh
  double quota_gas = 0.367;      // free allowance per boiler heat kWh
  SurplusCredit surplus = SurplusCredit::FlatBeta;
  CarbonBaseline baseline = CarbonBaseline::Flat;
};

// Emissions from grid purchases (kg) for one slot.
double grid_purchase_emissions(double p_buy_kw, double ef_kg_kwh, double dt_h = 1.0);

// Free allowance for the accounting day (kg).
double allocate_quota(double buy_elec_kwh, double gb_heat_kwh, const CarbonParams& p);

// Ladder-priced trading cost for a net position x = emissions - quota (kg).
// Continuous and convex; negative x earns the configured surplus credit.
double tiered_trading_cost(double net_kg, const CarbonParams& p);

// Marginal price at a net position (right-derivative), for diagnostics.
double tiered_marginal_price(double net_kg, const CarbonParams& p);

// The same cost as max over affine pieces (slope, intercept). Exactly equals
// tiered_trading_cost for FlatBeta surplus; the None variant adds a zero
// floor piece. Used to embed the cost in linear programs.
struct AffinePiece {
  double slope = 0.0;
  double intercept = 0.0;
};
std::vector<AffinePiece> epigraph_pieces(const CarbonParams& p);

struct EmissionTotals {
  double grid_kg = 0.0;
  double gt_kg = 0.0;
  double gb_kg = 0.0;
  double total() const { return grid_kg + gt_kg + gb_kg; }
};

struct CarbonLedger {
  double e_grid_kg = 0.0;
  double e_gt_kg = 0.0;
  double e_gb_kg = 0.0;
  double e_total_kg = 0.0;
  double quota_kg = 0.0;
  double net_kg = 0.0;       // e_total - quota (0 quota when market disabled)
  double cost_yuan = 0.0;
  double marginal_price = 0.0;
  std::string mode;          // "tiered" | "flat" | "none"
};

// Daily settlement. With the market enabled the quota applies and the ladder
// prices the net position; otherwise the baseline charge applies to raw
// emissions.
CarbonLedger settle(const EmissionTotals& e, double buy_elec_kwh, double gb_heat_kwh,
                    bool carbon_trading_enabled, const CarbonParams& p);

}  // namespace ries
