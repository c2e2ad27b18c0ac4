#include "ries/devices.hpp"

#include <algorithm>

namespace ries {

double wind_output(double v, const WindParams& p) {
  if (v < p.cut_in || v >= p.cut_out) return 0.0;
  if (v < p.rated_speed)
    return p.rated_kw * (v - p.cut_in) / (p.rated_speed - p.cut_in);
  return p.rated_kw;
}

double pv_output(double g, double t_cell, const PvParams& p) {
  if (g <= 0.0) return 0.0;
  double out = p.rated_kw * (g / p.g_nominal) *
               (1.0 + p.temp_coeff * (t_cell - p.t_ref));
  return std::max(0.0, out);
}

ChpOutput chp_output(double fuel_kwh, const ChpParams& p) {
  ChpOutput o;
  o.electric_kw = std::min(p.eta_e * fuel_kwh, p.cap_e_kw);
  o.heat_kw = p.eta_h * fuel_kwh;
  return o;
}

ChpOutput gt_output(double fuel_kwh, const GtParams& p) {
  ChpOutput o;
  o.electric_kw = std::min(p.eta_e * fuel_kwh, p.cap_e_kw);
  o.heat_kw = p.eta_h * fuel_kwh;
  return o;
}

double gb_fuel_slope(const GbParams& p, double gas_lhv_kwh) {
  if (p.fuel_b >= 0.0) return p.fuel_b;
  return 1.0 / (p.eta_h * gas_lhv_kwh);
}

GbFuel gb_fuel_and_emissions(double heat_kw, const GbParams& p, double gas_lhv_kwh,
                             double ef_kg_nm3) {
  double b = gb_fuel_slope(p, gas_lhv_kwh);
  GbFuel f;
  f.gas_nm3 = p.fuel_a * heat_kw * heat_kw + b * heat_kw + p.fuel_c;
  f.co2_kg = ef_kg_nm3 * f.gas_nm3;
  return f;
}

double eb_output(double p_elec_kw, const EbParams& p) {
  return std::min(p.eta * p_elec_kw, p.cap_h_kw);
}

}  // namespace ries
