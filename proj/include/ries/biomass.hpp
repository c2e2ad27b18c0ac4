#pragma once
#include "ries/common.hpp"

namespace ries {

// Dry-route feedstock (straw + dry garbage) -> pyrolysis fuel -> gas energy
// for the cogeneration unit. Fuel burned here is biogenic: net CO2 is zero.
struct PyrolysisParams {
  double temp_c = 700.0;     // operating temperature (equipment datum)
  double eta_pf = 0.82;      // fuel mass yield from feedstock mass
  double eta_pg = 0.85;      // fuel energy -> gas energy conversion
  double lhv_mj_kg = 16.0;   // pyrolysis fuel lower heating value
};

// Wet-route feedstock (wastewater sludge + wet garbage) -> digester biogas ->
// upgraded biomethane injected into the park gas bus.
struct DigesterParams {
  double temp_c = 35.0;     // mesophilic operating temperature
  double eta_ab = 0.70;     // anaerobic conversion efficiency
  double beta_st = 2.0;     // sludge mass per m3 wastewater treated (kg/m3)
  double beta_sludge = 1.2; // digestible fraction coefficient
  double rho_sludge = 1.0;  // density/consistency correction
  double beta_bg = 0.60;    // biogas yield per kg digestible mass (Nm3/kg)
  // Tank wall heat path: inner/outer film coefficients and two wall layers.
  double alpha1 = 8.0;   // W/m2K
  double alpha2 = 20.0;  // W/m2K
  double phi1 = 0.30;    // m, structural layer thickness
  double theta1 = 1.5;   // W/mK, structural layer conductivity
  double phi2 = 0.10;    // m, insulation thickness
  double theta2 = 0.040; // W/mK, insulation conductivity
  double surface_m2 = 800.0;
  double eta_eq = 0.85;  // heating-equipment efficiency serving the tank
};

struct UpgradeParams {
  double eta_b2g = 0.90;          // upgrading recovery
  double ch4_content = 0.96;      // product gas methane fraction
  double power_kwh_per_nm3 = 0.2; // parasitic electricity per product Nm3
};

// Pyrolysis fuel mass (kg) from feedstock masses (kg).
double pyrolysis_fuel(double straw_kg, double garbage_kg, const PyrolysisParams& p);

// Gas energy (kWh) made available to the cogeneration unit from fuel mass.
double pyrolysis_gas_energy(double fuel_kg, const PyrolysisParams& p);

// Digester biogas production (Nm3) from wastewater volume (m3) and wet
// garbage mass (kg).
double biogas_yield(double wastewater_m3, double wet_garbage_kg,
                    const DigesterParams& p);

// Series thermal-resistance transfer coefficient of the tank wall (W/m2K).
double digester_u_value(const DigesterParams& p);

// Heat that must be supplied to hold the tank at temperature (kW), before
// the heating-equipment efficiency is applied. Zero when ambient is warmer.
double digester_heat_demand(double outdoor_c, const DigesterParams& p);

// Product biomethane volume (Nm3) from raw biogas volume.
double upgrade_biogas(double biogas_nm3, const UpgradeParams& p);

// Parasitic electric draw (kW) of the upgrading unit for a product flow.
double b2g_power_draw(double product_nm3, const UpgradeParams& p);

}  // namespace ries
