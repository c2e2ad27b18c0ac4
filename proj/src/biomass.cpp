#include "ries/biomass.hpp"

#include <algorithm>

namespace ries {

double pyrolysis_fuel(double straw_kg, double garbage_kg, const PyrolysisParams& p) {
  return p.eta_pf * (straw_kg + garbage_kg);
}

double pyrolysis_gas_energy(double fuel_kg, const PyrolysisParams& p) {
  // MJ -> kWh
  return fuel_kg * p.lhv_mj_kg * p.eta_pg / 3.6;
}

double biogas_yield(double wastewater_m3, double wet_garbage_kg,
                    const DigesterParams& p) {
  double sludge_kg = wastewater_m3 * p.beta_st * p.eta_ab * p.beta_sludge * p.rho_sludge;
  return (sludge_kg + wet_garbage_kg) * p.beta_bg;
}

double digester_u_value(const DigesterParams& p) {
  double r = 1.0 / p.alpha1 + 1.0 / p.alpha2 + p.phi1 / p.theta1 + p.phi2 / p.theta2;
  return 1.0 / r;
}

double digester_heat_demand(double outdoor_c, const DigesterParams& p) {
  double dt = std::max(0.0, p.temp_c - outdoor_c);
  return p.surface_m2 * digester_u_value(p) * dt / 1000.0;  // W -> kW
}

double upgrade_biogas(double biogas_nm3, const UpgradeParams& p) {
  return p.eta_b2g * biogas_nm3;
}

double b2g_power_draw(double product_nm3, const UpgradeParams& p) {
  return p.power_kwh_per_nm3 * product_nm3;
}

}  // namespace ries
