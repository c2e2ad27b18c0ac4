#include "ries/carbon.hpp"

#include <algorithm>

namespace ries {

double grid_purchase_emissions(double p_buy_kw, double ef_kg_kwh, double dt_h) {
  return ef_kg_kwh * p_buy_kw * dt_h;
}

double allocate_quota(double buy_elec_kwh, double gb_heat_kwh, const CarbonParams& p) {
  return p.quota_elec * buy_elec_kwh + p.quota_gas * gb_heat_kwh;
}

double tiered_trading_cost(double x, const CarbonParams& p) {
  const double b = p.base_price, z = p.escalation, l = p.interval;
  if (x <= 0.0) return p.surplus == SurplusCredit::FlatBeta ? b * x : 0.0;
  if (x <= l) return b * x;
  if (x <= 2 * l) return b * l + b * (1 + z) * (x - l);
  if (x <= 3 * l) return b * (2 + z) * l + b * (1 + 2 * z) * (x - 2 * l);
  if (x <= 4 * l) return b * (3 + 3 * z) * l + b * (1 + 3 * z) * (x - 3 * l);
  return b * (4 + 6 * z) * l + b * (1 + 4 * z) * (x - 4 * l);
}

double tiered_marginal_price(double x, const CarbonParams& p) {
  const double b = p.base_price, z = p.escalation, l = p.interval;
  if (x < 0.0) return p.surplus == SurplusCredit::FlatBeta ? b : 0.0;
  if (x < l) return b;
  if (x < 2 * l) return b * (1 + z);
  if (x < 3 * l) return b * (1 + 2 * z);
  if (x < 4 * l) return b * (1 + 3 * z);
  return b * (1 + 4 * z);
}

std::vector<AffinePiece> epigraph_pieces(const CarbonParams& p) {
  const double b = p.base_price, z = p.escalation, l = p.interval;
  std::vector<AffinePiece> pieces;
  for (int k = 0; k < 5; ++k) {
    AffinePiece a;
    a.slope = b * (1 + k * z);
    a.intercept = -b * z * l * 0.5 * k * (k + 1);
    pieces.push_back(a);
  }
  if (p.surplus == SurplusCredit::None) pieces.push_back({0.0, 0.0});
  return pieces;
}

CarbonLedger settle(const EmissionTotals& e, double buy_elec_kwh, double gb_heat_kwh,
                    bool carbon_trading_enabled, const CarbonParams& p) {
  CarbonLedger led;
  led.e_grid_kg = e.grid_kg;
  led.e_gt_kg = e.gt_kg;
  led.e_gb_kg = e.gb_kg;
  led.e_total_kg = e.total();
  if (carbon_trading_enabled) {
    led.quota_kg = allocate_quota(buy_elec_kwh, gb_heat_kwh, p);
    led.net_kg = led.e_total_kg - led.quota_kg;
    led.cost_yuan = tiered_trading_cost(led.net_kg, p);
    led.marginal_price = tiered_marginal_price(led.net_kg, p);
    led.mode = "tiered";
  } else {
    led.quota_kg = 0.0;
    led.net_kg = led.e_total_kg;
    if (p.baseline == CarbonBaseline::Flat) {
      led.cost_yuan = p.base_price * led.e_total_kg;
      led.marginal_price = p.base_price;
      led.mode = "flat";
    } else {
      led.cost_yuan = 0.0;
      led.marginal_price = 0.0;
      led.mode = "none";
    }
  }
  return led;
}

}  // namespace ries
