#pragma once
#include "ries/common.hpp"

namespace ries {

// ---------------------------------------------------------------------------
// Renewables
// ---------------------------------------------------------------------------

struct WindParams {
  double cut_in = 3.0;     // m/s
  double rated_speed = 11.0;
  double cut_out = 20.0;
  double rated_kw = 2000.0;
  double sigma_frac = 0.08;  // forecast std-dev as fraction of forecast
  double om_yuan_kwh = 0.0296;
};

struct PvParams {
  double rated_kw = 1500.0;       // output at nominal irradiance, t_ref cell temp
  double g_nominal = 1000.0;      // W/m2
  double temp_coeff = -0.0035;    // 1/C, negative: hot cells derate
  double t_ref = 25.0;            // C
  double cell_temp_gain = 0.030;  // C per W/m2 on top of ambient (NOCT-style)
  double sigma_frac = 0.08;
  double om_yuan_kwh = 0.0235;
};

// Piecewise wind power curve: zero outside [cut_in, cut_out), linear ramp up
// to rated speed, flat plateau after.
double wind_output(double speed_m_s, const WindParams& p);

// Irradiance/temperature PV model, clamped at zero.
double pv_output(double irradiance_w_m2, double cell_temp_c, const PvParams& p);

// ---------------------------------------------------------------------------
// Fuel-burning and electric conversion units
// ---------------------------------------------------------------------------

struct ChpParams {
  double eta_e = 0.30;
  double eta_h = 0.50;
  double cap_e_kw = 4000.0;
  double fuel_max_kwh = 4000.0 / 0.30;  // fuel-side intake ceiling per hour
  double ramp_kw = 1600.0;              // electric-side ramp per hour
  double om_yuan_kwh = 0.025;           // on electric output
};

struct GtParams {
  double eta_e = 0.29;
  double eta_h = 0.42;  // exhaust heat recovered through the heat-recovery boiler
  double cap_e_kw = 4000.0;
  double ramp_kw = 2000.0;
  double om_yuan_kwh = 0.025;
};

struct GbParams {
  double eta_h = 0.88;
  double cap_h_kw = 1000.0;
  double ramp_kw = 800.0;
  // Fuel curve: gas Nm3 per hour = a*q^2 + b*q + c for heat setpoint q (kW).
  // b < 0 sentinel means "derive b = 1/(eta_h * gas_lhv)" at load time.
  double fuel_a = 0.0;
  double fuel_b = -1.0;
  double fuel_c = 0.0;
  double om_yuan_kwh = 0.018;
};

struct EbParams {
  double eta = 0.95;
  double cap_h_kw = 400.0;
  double om_yuan_kwh = 0.010;
};

// Carried for completeness of the equipment roster; not a dispatch decision.
struct HpParams {
  double cop = 3.0;
  double cap_h_kw = 400.0;
};

struct ChpOutput {
  double electric_kw = 0;
  double heat_kw = 0;
};

// Back-pressure cogeneration: outputs proportional to fuel energy intake,
// electric side capped at nameplate.
ChpOutput chp_output(double fuel_kwh, const ChpParams& p);

// Gas turbine with heat-recovery boiler; same fuel-energy convention.
ChpOutput gt_output(double fuel_kwh, const GtParams& p);

struct GbFuel {
  double gas_nm3 = 0;
  double co2_kg = 0;
};

// Gas-boiler fuel demand and stack emissions for a thermal-output setpoint.
// gas_lhv_kwh: energy per Nm3; ef_kg_nm3: emission factor.
GbFuel gb_fuel_and_emissions(double heat_kw, const GbParams& p, double gas_lhv_kwh,
                             double ef_kg_nm3);

// Resolved fuel-curve slope (handles the derive-from-efficiency sentinel).
double gb_fuel_slope(const GbParams& p, double gas_lhv_kwh);

// Electric boiler: heat output for electric input, capped at nameplate.
double eb_output(double p_elec_kw, const EbParams& p);

}  // namespace ries
