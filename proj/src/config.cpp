#include "ries/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ries/csv.hpp"
#include "ries/ini.hpp"

namespace fs = std::filesystem;

namespace ries {

ScenarioFlags scenario_flags(int n) {
  switch (n) {
    case 1: return {false, false};
    case 2: return {true, false};
    case 3: return {false, true};
    case 4: return {true, true};
  }
  throw ConfigError(fmt::format("scenario must be 1..4, got {}", n));
}

int scenario_number(const ScenarioFlags& f) {
  if (f.demand_response && f.carbon_trading) return 4;
  if (f.carbon_trading) return 3;
  if (f.demand_response) return 2;
  return 1;
}

namespace {

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    size_t b = item.find_last_not_of(" \t");
    item = item.substr(a, b - a + 1);
    char* end = nullptr;
    double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw ConfigError("config key " + key + ": bad list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string join_list(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt_full(v[i]);
  }
  return s;
}

std::array<TouPeriod, kSlots> parse_period_map(const std::string& s) {
  if (s.size() != kSlots)
    throw ConfigError("tou.period_map must have exactly 24 characters");
  std::array<TouPeriod, kSlots> m{};
  for (int t = 0; t < kSlots; ++t) {
    switch (s[static_cast<size_t>(t)]) {
      case 'V': case 'v': m[static_cast<size_t>(t)] = TouPeriod::Valley; break;
      case 'F': case 'f': m[static_cast<size_t>(t)] = TouPeriod::Flat; break;
      case 'P': case 'p': m[static_cast<size_t>(t)] = TouPeriod::Peak; break;
      default:
        throw ConfigError(fmt::format("tou.period_map: bad char at slot {}", t));
    }
  }
  return m;
}

std::string format_period_map(const std::array<TouPeriod, kSlots>& m) {
  std::string s(kSlots, 'F');
  for (int t = 0; t < kSlots; ++t) {
    TouPeriod p = m[static_cast<size_t>(t)];
    s[static_cast<size_t>(t)] = p == TouPeriod::Valley ? 'V' : (p == TouPeriod::Peak ? 'P' : 'F');
  }
  return s;
}

TimeProfile load_profile(const IniFile& ini, const std::string& key, const fs::path& dir,
                         Unit unit) {
  std::string file = ini.get_str("profiles." + key);
  return read_profile_csv((dir / file).string(), unit);
}

SurplusCredit parse_surplus(const std::string& s) {
  if (s == "flat_beta") return SurplusCredit::FlatBeta;
  if (s == "none") return SurplusCredit::None;
  throw ConfigError("carbon.surplus_credit must be 'flat_beta' or 'none'");
}

CarbonBaseline parse_baseline(const std::string& s) {
  if (s == "flat") return CarbonBaseline::Flat;
  if (s == "none") return CarbonBaseline::None;
  throw ConfigError("carbon.baseline must be 'flat' or 'none'");
}

}  // namespace

SystemConfig load_config(const std::string& path) {
  IniFile ini = IniFile::load(path);
  fs::path dir = fs::path(path).parent_path();

  SystemConfig c;
  c.base_dir = dir.string();
  c.seed = ini.get_int_or("seed", 42);
  c.gas_price = ini.get_num_or("gas_price_yuan_nm3", 3.45);
  c.gas_lhv_kwh = ini.get_num_or("gas_lhv_kwh_nm3", 10.0);

  c.tou.valley = ini.get_num_or("tou.valley", 0.2988);
  c.tou.flat = ini.get_num_or("tou.flat", 0.5855);
  c.tou.peak = ini.get_num_or("tou.peak", 0.8882);
  if (ini.has("tou.period_map"))
    c.tou.period = parse_period_map(ini.get_str("tou.period_map"));

  c.wind.cut_in = ini.get_num_or("wind.cut_in", c.wind.cut_in);
  c.wind.rated_speed = ini.get_num_or("wind.rated_speed", c.wind.rated_speed);
  c.wind.cut_out = ini.get_num_or("wind.cut_out", c.wind.cut_out);
  c.wind.rated_kw = ini.get_num_or("wind.rated_kw", c.wind.rated_kw);
  c.wind.sigma_frac = ini.get_num_or("wind.sigma_frac", c.wind.sigma_frac);
  c.wind.om_yuan_kwh = ini.get_num_or("wind.om_yuan_kwh", c.wind.om_yuan_kwh);

  c.pv.rated_kw = ini.get_num_or("pv.rated_kw", c.pv.rated_kw);
  c.pv.g_nominal = ini.get_num_or("pv.g_nominal", c.pv.g_nominal);
  c.pv.temp_coeff = ini.get_num_or("pv.temp_coeff", c.pv.temp_coeff);
  c.pv.t_ref = ini.get_num_or("pv.t_ref", c.pv.t_ref);
  c.pv.cell_temp_gain = ini.get_num_or("pv.cell_temp_gain", c.pv.cell_temp_gain);
  c.pv.sigma_frac = ini.get_num_or("pv.sigma_frac", c.pv.sigma_frac);
  c.pv.om_yuan_kwh = ini.get_num_or("pv.om_yuan_kwh", c.pv.om_yuan_kwh);

  c.chp.eta_e = ini.get_num_or("chp.eta_e", c.chp.eta_e);
  c.chp.eta_h = ini.get_num_or("chp.eta_h", c.chp.eta_h);
  c.chp.cap_e_kw = ini.get_num_or("chp.cap_e_kw", c.chp.cap_e_kw);
  c.chp.fuel_max_kwh = ini.get_num_or("chp.fuel_max_kwh", c.chp.cap_e_kw / c.chp.eta_e);
  c.chp.ramp_kw = ini.get_num_or("chp.ramp_kw", c.chp.ramp_kw);
  c.chp.om_yuan_kwh = ini.get_num_or("chp.om_yuan_kwh", c.chp.om_yuan_kwh);

  c.gt.eta_e = ini.get_num_or("gt.eta_e", c.gt.eta_e);
  c.gt.eta_h = ini.get_num_or("gt.eta_h", c.gt.eta_h);
  c.gt.cap_e_kw = ini.get_num_or("gt.cap_e_kw", c.gt.cap_e_kw);
  c.gt.ramp_kw = ini.get_num_or("gt.ramp_kw", c.gt.ramp_kw);
  c.gt.om_yuan_kwh = ini.get_num_or("gt.om_yuan_kwh", c.gt.om_yuan_kwh);

  c.gb.eta_h = ini.get_num_or("gb.eta_h", c.gb.eta_h);
  c.gb.cap_h_kw = ini.get_num_or("gb.cap_h_kw", c.gb.cap_h_kw);
  c.gb.ramp_kw = ini.get_num_or("gb.ramp_kw", c.gb.ramp_kw);
  c.gb.fuel_a = ini.get_num_or("gb.fuel_a", c.gb.fuel_a);
  c.gb.fuel_b = ini.get_num_or("gb.fuel_b", c.gb.fuel_b);
  c.gb.fuel_c = ini.get_num_or("gb.fuel_c", c.gb.fuel_c);
  c.gb.om_yuan_kwh = ini.get_num_or("gb.om_yuan_kwh", c.gb.om_yuan_kwh);

  c.eb.eta = ini.get_num_or("eb.eta", c.eb.eta);
  c.eb.cap_h_kw = ini.get_num_or("eb.cap_h_kw", c.eb.cap_h_kw);
  c.eb.om_yuan_kwh = ini.get_num_or("eb.om_yuan_kwh", c.eb.om_yuan_kwh);

  c.hp.cop = ini.get_num_or("hp.cop", c.hp.cop);
  c.hp.cap_h_kw = ini.get_num_or("hp.cap_h_kw", c.hp.cap_h_kw);

  auto load_storage = [&ini](const std::string& sec, StorageParams& s) {
    s.cap_kwh = ini.get_num_or(sec + ".cap_kwh", s.cap_kwh);
    s.p_ch_kw = ini.get_num_or(sec + ".p_ch_kw", s.p_ch_kw);
    s.p_dis_kw = ini.get_num_or(sec + ".p_dis_kw", s.p_dis_kw);
    s.eta_ch = ini.get_num_or(sec + ".eta_ch", s.eta_ch);
    s.eta_dis = ini.get_num_or(sec + ".eta_dis", s.eta_dis);
    s.q0_kwh = ini.get_num_or(sec + ".q0_kwh", s.q0_kwh);
    s.om_yuan_kwh = ini.get_num_or(sec + ".om_yuan_kwh", s.om_yuan_kwh);
  };
  c.storage_e.eta_ch = 0.85;
  c.storage_e.eta_dis = 0.90;
  c.storage_h.eta_ch = 0.85;
  c.storage_h.eta_dis = 0.85;
  load_storage("storage_e", c.storage_e);
  load_storage("storage_h", c.storage_h);

  c.pyro.temp_c = ini.get_num_or("pyrolysis.temp_c", c.pyro.temp_c);
  c.pyro.eta_pf = ini.get_num_or("pyrolysis.eta_pf", c.pyro.eta_pf);
  c.pyro.eta_pg = ini.get_num_or("pyrolysis.eta_pg", c.pyro.eta_pg);
  c.pyro.lhv_mj_kg = ini.get_num_or("pyrolysis.lhv_mj_kg", c.pyro.lhv_mj_kg);

  c.digester.temp_c = ini.get_num_or("digester.temp_c", c.digester.temp_c);
  c.digester.eta_ab = ini.get_num_or("digester.eta_ab", c.digester.eta_ab);
  c.digester.beta_st = ini.get_num_or("digester.beta_st", c.digester.beta_st);
  c.digester.beta_sludge = ini.get_num_or("digester.beta_sludge", c.digester.beta_sludge);
  c.digester.rho_sludge = ini.get_num_or("digester.rho_sludge", c.digester.rho_sludge);
  c.digester.beta_bg = ini.get_num_or("digester.beta_bg", c.digester.beta_bg);
  c.digester.alpha1 = ini.get_num_or("digester.alpha1", c.digester.alpha1);
  c.digester.alpha2 = ini.get_num_or("digester.alpha2", c.digester.alpha2);
  c.digester.phi1 = ini.get_num_or("digester.phi1", c.digester.phi1);
  c.digester.theta1 = ini.get_num_or("digester.theta1", c.digester.theta1);
  c.digester.phi2 = ini.get_num_or("digester.phi2", c.digester.phi2);
  c.digester.theta2 = ini.get_num_or("digester.theta2", c.digester.theta2);
  c.digester.surface_m2 = ini.get_num_or("digester.surface_m2", c.digester.surface_m2);
  c.digester.eta_eq = ini.get_num_or("digester.eta_eq", c.digester.eta_eq);

  c.upgrade.eta_b2g = ini.get_num_or("upgrade.eta_b2g", c.upgrade.eta_b2g);
  c.upgrade.ch4_content = ini.get_num_or("upgrade.ch4_content", c.upgrade.ch4_content);
  c.upgrade.power_kwh_per_nm3 =
      ini.get_num_or("upgrade.power_kwh_per_nm3", c.upgrade.power_kwh_per_nm3);

  c.carbon.base_price = ini.get_num_or("carbon.base_price", c.carbon.base_price);
  c.carbon.interval = ini.get_num_or("carbon.interval", c.carbon.interval);
  c.carbon.escalation = ini.get_num_or("carbon.escalation", c.carbon.escalation);
  c.carbon.grid_ef_kg_kwh = ini.get_num_or("carbon.grid_ef", c.carbon.grid_ef_kg_kwh);
  c.carbon.gas_ef_kg_nm3 = ini.get_num_or("carbon.gas_ef", c.carbon.gas_ef_kg_nm3);
  c.carbon.quota_elec = ini.get_num_or("carbon.quota_elec", c.carbon.quota_elec);
  c.carbon.quota_gas = ini.get_num_or("carbon.quota_gas", c.carbon.quota_gas);
  c.carbon.surplus = parse_surplus(ini.get_str_or("carbon.surplus_credit", "flat_beta"));
  c.carbon.baseline = parse_baseline(ini.get_str_or("carbon.baseline", "flat"));

  c.dr.shares.fixed = ini.get_num_or("dr.share_fixed", c.dr.shares.fixed);
  c.dr.shares.transferable = ini.get_num_or("dr.share_transferable", c.dr.shares.transferable);
  c.dr.shares.reducible = ini.get_num_or("dr.share_reducible", c.dr.shares.reducible);
  c.dr.shares.replaceable = ini.get_num_or("dr.share_replaceable", c.dr.shares.replaceable);
  c.dr.elasticity.self = ini.get_num_or("dr.elasticity_self", c.dr.elasticity.self);
  c.dr.elasticity.cross = ini.get_num_or("dr.elasticity_cross", c.dr.elasticity.cross);
  c.dr.reference_price = ini.get_num_or("dr.reference_price", c.dr.reference_price);
  c.dr.use_price = ini.get_bool_or("dr.use_price_dr", c.dr.use_price);
  c.dr.use_incentive = ini.get_bool_or("dr.use_incentive_dr", c.dr.use_incentive);
  if (ini.has("dr.ibdr_down_prices"))
    c.dr.ibdr_down_price = parse_list(ini.get_str("dr.ibdr_down_prices"), "dr.ibdr_down_prices");
  if (ini.has("dr.ibdr_down_fracs"))
    c.dr.ibdr_down_frac = parse_list(ini.get_str("dr.ibdr_down_fracs"), "dr.ibdr_down_fracs");
  if (ini.has("dr.ibdr_up_prices"))
    c.dr.ibdr_up_price = parse_list(ini.get_str("dr.ibdr_up_prices"), "dr.ibdr_up_prices");
  if (ini.has("dr.ibdr_up_fracs"))
    c.dr.ibdr_up_frac = parse_list(ini.get_str("dr.ibdr_up_fracs"), "dr.ibdr_up_fracs");
  c.dr.replace_price = ini.get_num_or("dr.replace_price", c.dr.replace_price);
  c.dr.replace_eff = ini.get_num_or("dr.replace_eff", c.dr.replace_eff);
  c.dr.th_shift_share = ini.get_num_or("dr.thermal_shift_share", c.dr.th_shift_share);
  c.dr.th_curtail_share = ini.get_num_or("dr.thermal_curtail_share", c.dr.th_curtail_share);
  c.dr.th_curtail_price = ini.get_num_or("dr.thermal_curtail_price", c.dr.th_curtail_price);

  c.comfort.t_skin = ini.get_num_or("comfort.t_skin", c.comfort.t_skin);
  c.comfort.met = ini.get_num_or("comfort.met", c.comfort.met);
  c.comfort.i_cl = ini.get_num_or("comfort.i_cl", c.comfort.i_cl);
  c.comfort.night_limit = ini.get_num_or("comfort.night_limit", c.comfort.night_limit);
  c.comfort.day_upper = ini.get_num_or("comfort.day_upper", c.comfort.day_upper);
  c.comfort.day_lower = ini.get_num_or("comfort.day_lower", c.comfort.day_lower);
  c.comfort.day_start = static_cast<int>(ini.get_int_or("comfort.day_start", c.comfort.day_start));
  c.comfort.day_end = static_cast<int>(ini.get_int_or("comfort.day_end", c.comfort.day_end));

  c.building.n_rooms = ini.get_num_or("building.n_rooms", c.building.n_rooms);
  c.building.k_f_kw_c = ini.get_num_or("building.k_f_kw_c", c.building.k_f_kw_c);
  c.building.c_kwh_c = ini.get_num_or("building.c_kwh_c", c.building.c_kwh_c);
  c.building.t_set = ini.get_num_or("building.t_set", c.building.t_set);

  c.dispatch.confidence = ini.get_num_or("dispatch.confidence", c.dispatch.confidence);
  c.dispatch.heat_loss = ini.get_num_or("dispatch.heat_loss", c.dispatch.heat_loss);
  c.dispatch.curtail_penalty =
      ini.get_num_or("dispatch.curtail_penalty", c.dispatch.curtail_penalty);

  c.grid.coal_a = ini.get_num_or("grid.coal_a", c.grid.coal_a);
  c.grid.coal_b = ini.get_num_or("grid.coal_b", c.grid.coal_b);
  c.grid.coal_c = ini.get_num_or("grid.coal_c", c.grid.coal_c);
  c.grid.coal_cap_kw = ini.get_num_or("grid.coal_cap_kw", c.grid.coal_cap_kw);
  c.grid.coal_ef = ini.get_num_or("grid.coal_ef", c.grid.coal_ef);
  c.grid.gas_b = ini.get_num_or("grid.gas_b", c.grid.gas_b);
  c.grid.gas_cap_kw = ini.get_num_or("grid.gas_cap_kw", c.grid.gas_cap_kw);
  c.grid.gas_ef = ini.get_num_or("grid.gas_ef", c.grid.gas_ef);
  c.grid.beta = ini.get_num_or("grid.beta", c.grid.beta);
  c.grid.curtail_penalty = ini.get_num_or("grid.curtail_penalty", c.grid.curtail_penalty);
  c.grid.price_floor = ini.get_num_or("grid.price_floor", c.grid.price_floor);
  c.grid.price_cap = ini.get_num_or("grid.price_cap", c.grid.price_cap);

  c.ga.population = static_cast<int>(ini.get_int_or("ga.population", c.ga.population));
  c.ga.generations = static_cast<int>(ini.get_int_or("ga.generations", c.ga.generations));
  c.ga.mutation = ini.get_num_or("ga.mutation", c.ga.mutation);
  c.ga.crossover = ini.get_num_or("ga.crossover", c.ga.crossover);
  c.ga.eps = ini.get_num_or("ga.eps", c.ga.eps);
  c.ga.patience = static_cast<int>(ini.get_int_or("ga.patience", c.ga.patience));

  c.profiles.load_e = load_profile(ini, "load_electric", dir, Unit::kW);
  c.profiles.load_h = load_profile(ini, "load_thermal", dir, Unit::kW);
  c.profiles.wind_speed = load_profile(ini, "wind_speed", dir, Unit::MPerS);
  c.profiles.irradiance = load_profile(ini, "irradiance", dir, Unit::WPerM2);
  c.profiles.outdoor = load_profile(ini, "outdoor_temp", dir, Unit::Celsius);
  c.profiles.straw = load_profile(ini, "straw", dir, Unit::Kg);
  c.profiles.dry_garbage = load_profile(ini, "dry_garbage", dir, Unit::Kg);
  c.profiles.wastewater = load_profile(ini, "wastewater", dir, Unit::M3);
  c.profiles.wet_garbage = load_profile(ini, "wet_garbage", dir, Unit::Kg);
  c.profiles.urban_load = load_profile(ini, "urban_load", dir, Unit::kW);
  c.profiles.grid_pv = load_profile(ini, "grid_pv", dir, Unit::kW);

  validate(c);
  derive(c);
  return c;
}

void derive(SystemConfig& c) {
  Derived& d = c.derived;
  d.wind_fore = constant_profile(0, Unit::kW, "wind_fore");
  d.pv_fore = constant_profile(0, Unit::kW, "pv_fore");
  d.pg_energy = constant_profile(0, Unit::kWh, "pg_energy");
  d.biogas = constant_profile(0, Unit::Nm3, "biogas");
  d.digester_heat = constant_profile(0, Unit::kW, "digester_heat");
  d.heating_base = constant_profile(0, Unit::kW, "heating_base");
  d.load_h_total = constant_profile(0, Unit::kW, "load_h_total");
  for (int t = 0; t < kSlots; ++t) {
    double g = c.profiles.irradiance[t];
    double cell = c.profiles.outdoor[t] + c.pv.cell_temp_gain * g;
    d.wind_fore[t] = wind_output(c.profiles.wind_speed[t], c.wind);
    d.pv_fore[t] = pv_output(g, cell, c.pv);
    double fuel_kg = pyrolysis_fuel(c.profiles.straw[t], c.profiles.dry_garbage[t], c.pyro);
    d.pg_energy[t] = pyrolysis_gas_energy(fuel_kg, c.pyro);
    d.biogas[t] = biogas_yield(c.profiles.wastewater[t], c.profiles.wet_garbage[t], c.digester);
    d.digester_heat[t] =
        digester_heat_demand(c.profiles.outdoor[t], c.digester) / c.digester.eta_eq;
    d.heating_base[t] = std::max(
        0.0, c.building.n_rooms * c.building.k_f_kw_c * (c.building.t_set - c.profiles.outdoor[t]));
    d.load_h_total[t] = c.profiles.load_h[t] + d.heating_base[t] + d.digester_heat[t];
  }
}

namespace {
void check_eff(double v, const std::string& name) {
  if (!(v > 0.0 && v <= 1.0))
    throw ConfigError(fmt::format("{} must be in (0, 1], got {}", name, v));
}
void check_pos(double v, const std::string& name) {
  if (!(v > 0.0)) throw ConfigError(fmt::format("{} must be positive, got {}", name, v));
}
void check_nonneg(double v, const std::string& name) {
  if (!(v >= 0.0)) throw ConfigError(fmt::format("{} must be non-negative, got {}", name, v));
}
}  // namespace

void validate(const SystemConfig& c) {
  double share_sum = c.dr.shares.fixed + c.dr.shares.transferable + c.dr.shares.reducible +
                     c.dr.shares.replaceable;
  if (std::abs(share_sum - 1.0) > 1e-9)
    throw ConfigError(fmt::format("dr load shares must sum to 1.0, got {}", share_sum));
  check_nonneg(c.dr.shares.fixed, "dr.share_fixed");
  check_nonneg(c.dr.shares.transferable, "dr.share_transferable");
  check_nonneg(c.dr.shares.reducible, "dr.share_reducible");
  check_nonneg(c.dr.shares.replaceable, "dr.share_replaceable");

  c.tou.validate();

  check_eff(c.chp.eta_e, "chp.eta_e");
  check_eff(c.chp.eta_h, "chp.eta_h");
  check_eff(c.gt.eta_e, "gt.eta_e");
  check_eff(c.gt.eta_h, "gt.eta_h");
  check_eff(c.gb.eta_h, "gb.eta_h");
  check_eff(c.eb.eta, "eb.eta");
  check_eff(c.storage_e.eta_ch, "storage_e.eta_ch");
  check_eff(c.storage_e.eta_dis, "storage_e.eta_dis");
  check_eff(c.storage_h.eta_ch, "storage_h.eta_ch");
  check_eff(c.storage_h.eta_dis, "storage_h.eta_dis");
  check_eff(c.pyro.eta_pf, "pyrolysis.eta_pf");
  check_eff(c.pyro.eta_pg, "pyrolysis.eta_pg");
  check_eff(c.digester.eta_ab, "digester.eta_ab");
  check_eff(c.digester.eta_eq, "digester.eta_eq");
  check_eff(c.upgrade.eta_b2g, "upgrade.eta_b2g");
  check_eff(c.upgrade.ch4_content, "upgrade.ch4_content");
  check_pos(c.hp.cop, "hp.cop");  // coefficient of performance may exceed 1

  check_pos(c.gas_price, "gas_price_yuan_nm3");
  check_pos(c.gas_lhv_kwh, "gas_lhv_kwh_nm3");

  check_nonneg(c.wind.rated_kw, "wind.rated_kw");
  if (!(c.wind.cut_in < c.wind.rated_speed && c.wind.rated_speed <= c.wind.cut_out))
    throw ConfigError("wind speeds must satisfy cut_in < rated_speed <= cut_out");
  check_nonneg(c.wind.om_yuan_kwh, "wind.om_yuan_kwh");
  check_nonneg(c.pv.rated_kw, "pv.rated_kw");
  check_pos(c.pv.g_nominal, "pv.g_nominal");
  check_nonneg(c.pv.om_yuan_kwh, "pv.om_yuan_kwh");

  check_nonneg(c.chp.cap_e_kw, "chp.cap_e_kw");
  check_nonneg(c.chp.fuel_max_kwh, "chp.fuel_max_kwh");
  check_pos(c.chp.ramp_kw, "chp.ramp_kw");
  check_nonneg(c.gt.cap_e_kw, "gt.cap_e_kw");
  check_pos(c.gt.ramp_kw, "gt.ramp_kw");
  check_nonneg(c.gb.cap_h_kw, "gb.cap_h_kw");
  check_pos(c.gb.ramp_kw, "gb.ramp_kw");
  check_nonneg(c.gb.fuel_a, "gb.fuel_a");
  check_nonneg(c.gb.fuel_c, "gb.fuel_c");
  check_nonneg(c.eb.cap_h_kw, "eb.cap_h_kw");

  for (const StorageParams* s : {&c.storage_e, &c.storage_h}) {
    const char* tag = s == &c.storage_e ? "storage_e" : "storage_h";
    check_nonneg(s->cap_kwh, std::string(tag) + ".cap_kwh");
    check_nonneg(s->p_ch_kw, std::string(tag) + ".p_ch_kw");
    check_nonneg(s->p_dis_kw, std::string(tag) + ".p_dis_kw");
    if (s->q0_kwh < 0 || s->q0_kwh > s->cap_kwh)
      throw ConfigError(fmt::format("{}.q0_kwh must lie within [0, cap]", tag));
  }

  check_pos(c.carbon.interval, "carbon.interval");
  check_nonneg(c.carbon.base_price, "carbon.base_price");
  check_nonneg(c.carbon.escalation, "carbon.escalation");
  check_nonneg(c.carbon.grid_ef_kg_kwh, "carbon.grid_ef");
  check_nonneg(c.carbon.gas_ef_kg_nm3, "carbon.gas_ef");
  check_nonneg(c.carbon.quota_elec, "carbon.quota_elec");
  check_nonneg(c.carbon.quota_gas, "carbon.quota_gas");

  if (!(c.dispatch.confidence > 0.0 && c.dispatch.confidence < 1.0))
    throw ConfigError("dispatch.confidence must be in (0, 1)");
  if (!(c.dispatch.heat_loss >= 0.0 && c.dispatch.heat_loss < 1.0))
    throw ConfigError("dispatch.heat_loss must be in [0, 1)");
  check_nonneg(c.dispatch.curtail_penalty, "dispatch.curtail_penalty");

  if (c.dr.ibdr_down_price.size() != c.dr.ibdr_down_frac.size())
    throw ConfigError("dr.ibdr_down_prices and dr.ibdr_down_fracs must have the same length");
  if (c.dr.ibdr_up_price.size() != c.dr.ibdr_up_frac.size())
    throw ConfigError("dr.ibdr_up_prices and dr.ibdr_up_fracs must have the same length");
  check_pos(c.dr.reference_price, "dr.reference_price");
  check_nonneg(c.dr.th_shift_share, "dr.thermal_shift_share");
  check_nonneg(c.dr.th_curtail_share, "dr.thermal_curtail_share");

  check_pos(c.building.k_f_kw_c, "building.k_f_kw_c");
  check_pos(c.building.c_kwh_c, "building.c_kwh_c");
  check_nonneg(c.building.n_rooms, "building.n_rooms");
  if (c.comfort.day_start < 0 || c.comfort.day_end >= kSlots ||
      c.comfort.day_start > c.comfort.day_end)
    throw ConfigError("comfort day window must satisfy 0 <= day_start <= day_end <= 23");
  // the heating setpoint must be admissible in every slot, or no dispatch
  // could hold comfort
  for (int t = 0; t < kSlots; ++t) {
    TempBand band = comfort_band(t, c.comfort);
    if (c.building.t_set < band.lo_c - 1e-9 || c.building.t_set > band.hi_c + 1e-9)
      throw ConfigError(
          fmt::format("building.t_set {} violates the comfort band [{:.3f}, {:.3f}] at slot {}",
                      c.building.t_set, band.lo_c, band.hi_c, t));
  }

  if (!(c.grid.price_floor > 0 && c.grid.price_floor <= c.grid.price_cap))
    throw ConfigError("grid price bounds must satisfy 0 < floor <= cap");
  if (c.ga.population < 2) throw ConfigError("ga.population must be at least 2");
  if (c.ga.generations < 1) throw ConfigError("ga.generations must be at least 1");
  if (!(c.ga.mutation >= 0 && c.ga.mutation <= 1))
    throw ConfigError("ga.mutation must be in [0, 1]");
  if (!(c.ga.crossover >= 0 && c.ga.crossover <= 1))
    throw ConfigError("ga.crossover must be in [0, 1]");
}

std::string serialize_config(const SystemConfig& c) {
  std::ostringstream o;
  auto kv = [&o](const std::string& k, double v) { o << k << " = " << fmt_full(v) << "\n"; };
  auto kvi = [&o](const std::string& k, long v) { o << k << " = " << v << "\n"; };
  auto kvs = [&o](const std::string& k, const std::string& v) { o << k << " = " << v << "\n"; };

  kvi("seed", c.seed);
  kv("gas_price_yuan_nm3", c.gas_price);
  kv("gas_lhv_kwh_nm3", c.gas_lhv_kwh);

  o << "\n[profiles]\n";
  kvs("load_electric", "load_electric.csv");
  kvs("load_thermal", "load_thermal.csv");
  kvs("wind_speed", "wind_speed.csv");
  kvs("irradiance", "irradiance.csv");
  kvs("outdoor_temp", "outdoor_temp.csv");
  kvs("straw", "straw.csv");
  kvs("dry_garbage", "dry_garbage.csv");
  kvs("wastewater", "wastewater.csv");
  kvs("wet_garbage", "wet_garbage.csv");
  kvs("urban_load", "urban_load.csv");
  kvs("grid_pv", "grid_pv.csv");

  o << "\n[tou]\n";
  kv("valley", c.tou.valley);
  kv("flat", c.tou.flat);
  kv("peak", c.tou.peak);
  kvs("period_map", format_period_map(c.tou.period));

  o << "\n[wind]\n";
  kv("cut_in", c.wind.cut_in);
  kv("rated_speed", c.wind.rated_speed);
  kv("cut_out", c.wind.cut_out);
  kv("rated_kw", c.wind.rated_kw);
  kv("sigma_frac", c.wind.sigma_frac);
  kv("om_yuan_kwh", c.wind.om_yuan_kwh);

  o << "\n[pv]\n";
  kv("rated_kw", c.pv.rated_kw);
  kv("g_nominal", c.pv.g_nominal);
  kv("temp_coeff", c.pv.temp_coeff);
  kv("t_ref", c.pv.t_ref);
  kv("cell_temp_gain", c.pv.cell_temp_gain);
  kv("sigma_frac", c.pv.sigma_frac);
  kv("om_yuan_kwh", c.pv.om_yuan_kwh);

  o << "\n[chp]\n";
  kv("eta_e", c.chp.eta_e);
  kv("eta_h", c.chp.eta_h);
  kv("cap_e_kw", c.chp.cap_e_kw);
  kv("fuel_max_kwh", c.chp.fuel_max_kwh);
  kv("ramp_kw", c.chp.ramp_kw);
  kv("om_yuan_kwh", c.chp.om_yuan_kwh);

  o << "\n[gt]\n";
  kv("eta_e", c.gt.eta_e);
  kv("eta_h", c.gt.eta_h);
  kv("cap_e_kw", c.gt.cap_e_kw);
  kv("ramp_kw", c.gt.ramp_kw);
  kv("om_yuan_kwh", c.gt.om_yuan_kwh);

  o << "\n[gb]\n";
  kv("eta_h", c.gb.eta_h);
  kv("cap_h_kw", c.gb.cap_h_kw);
  kv("ramp_kw", c.gb.ramp_kw);
  kv("fuel_a", c.gb.fuel_a);
  kv("fuel_b", c.gb.fuel_b);
  kv("fuel_c", c.gb.fuel_c);
  kv("om_yuan_kwh", c.gb.om_yuan_kwh);

  o << "\n[eb]\n";
  kv("eta", c.eb.eta);
  kv("cap_h_kw", c.eb.cap_h_kw);
  kv("om_yuan_kwh", c.eb.om_yuan_kwh);

  o << "\n[hp]\n";
  kv("cop", c.hp.cop);
  kv("cap_h_kw", c.hp.cap_h_kw);

  auto dump_storage = [&](const std::string& sec, const StorageParams& s) {
    o << "\n[" << sec << "]\n";
    kv("cap_kwh", s.cap_kwh);
    kv("p_ch_kw", s.p_ch_kw);
    kv("p_dis_kw", s.p_dis_kw);
    kv("eta_ch", s.eta_ch);
    kv("eta_dis", s.eta_dis);
    kv("q0_kwh", s.q0_kwh);
    kv("om_yuan_kwh", s.om_yuan_kwh);
  };
  dump_storage("storage_e", c.storage_e);
  dump_storage("storage_h", c.storage_h);

  o << "\n[pyrolysis]\n";
  kv("temp_c", c.pyro.temp_c);
  kv("eta_pf", c.pyro.eta_pf);
  kv("eta_pg", c.pyro.eta_pg);
  kv("lhv_mj_kg", c.pyro.lhv_mj_kg);

  o << "\n[digester]\n";
  kv("temp_c", c.digester.temp_c);
  kv("eta_ab", c.digester.eta_ab);
  kv("beta_st", c.digester.beta_st);
  kv("beta_sludge", c.digester.beta_sludge);
  kv("rho_sludge", c.digester.rho_sludge);
  kv("beta_bg", c.digester.beta_bg);
  kv("alpha1", c.digester.alpha1);
  kv("alpha2", c.digester.alpha2);
  kv("phi1", c.digester.phi1);
  kv("theta1", c.digester.theta1);
  kv("phi2", c.digester.phi2);
  kv("theta2", c.digester.theta2);
  kv("surface_m2", c.digester.surface_m2);
  kv("eta_eq", c.digester.eta_eq);

  o << "\n[upgrade]\n";
  kv("eta_b2g", c.upgrade.eta_b2g);
  kv("ch4_content", c.upgrade.ch4_content);
  kv("power_kwh_per_nm3", c.upgrade.power_kwh_per_nm3);

  o << "\n[carbon]\n";
  kv("base_price", c.carbon.base_price);
  kv("interval", c.carbon.interval);
  kv("escalation", c.carbon.escalation);
  kv("grid_ef", c.carbon.grid_ef_kg_kwh);
  kv("gas_ef", c.carbon.gas_ef_kg_nm3);
  kv("quota_elec", c.carbon.quota_elec);
  kv("quota_gas", c.carbon.quota_gas);
  kvs("surplus_credit", c.carbon.surplus == SurplusCredit::FlatBeta ? "flat_beta" : "none");
  kvs("baseline", c.carbon.baseline == CarbonBaseline::Flat ? "flat" : "none");

  o << "\n[dr]\n";
  kv("share_fixed", c.dr.shares.fixed);
  kv("share_transferable", c.dr.shares.transferable);
  kv("share_reducible", c.dr.shares.reducible);
  kv("share_replaceable", c.dr.shares.replaceable);
  kv("elasticity_self", c.dr.elasticity.self);
  kv("elasticity_cross", c.dr.elasticity.cross);
  kv("reference_price", c.dr.reference_price);
  kvs("use_price_dr", c.dr.use_price ? "true" : "false");
  kvs("use_incentive_dr", c.dr.use_incentive ? "true" : "false");
  kvs("ibdr_down_prices", join_list(c.dr.ibdr_down_price));
  kvs("ibdr_down_fracs", join_list(c.dr.ibdr_down_frac));
  kvs("ibdr_up_prices", join_list(c.dr.ibdr_up_price));
  kvs("ibdr_up_fracs", join_list(c.dr.ibdr_up_frac));
  kv("replace_price", c.dr.replace_price);
  kv("replace_eff", c.dr.replace_eff);
  kv("thermal_shift_share", c.dr.th_shift_share);
  kv("thermal_curtail_share", c.dr.th_curtail_share);
  kv("thermal_curtail_price", c.dr.th_curtail_price);

  o << "\n[comfort]\n";
  kv("t_skin", c.comfort.t_skin);
  kv("met", c.comfort.met);
  kv("i_cl", c.comfort.i_cl);
  kv("night_limit", c.comfort.night_limit);
  kv("day_upper", c.comfort.day_upper);
  kv("day_lower", c.comfort.day_lower);
  kvi("day_start", c.comfort.day_start);
  kvi("day_end", c.comfort.day_end);

  o << "\n[building]\n";
  kv("n_rooms", c.building.n_rooms);
  kv("k_f_kw_c", c.building.k_f_kw_c);
  kv("c_kwh_c", c.building.c_kwh_c);
  kv("t_set", c.building.t_set);

  o << "\n[dispatch]\n";
  kv("confidence", c.dispatch.confidence);
  kv("heat_loss", c.dispatch.heat_loss);
  kv("curtail_penalty", c.dispatch.curtail_penalty);

  o << "\n[grid]\n";
  kv("coal_a", c.grid.coal_a);
  kv("coal_b", c.grid.coal_b);
  kv("coal_c", c.grid.coal_c);
  kv("coal_cap_kw", c.grid.coal_cap_kw);
  kv("coal_ef", c.grid.coal_ef);
  kv("gas_b", c.grid.gas_b);
  kv("gas_cap_kw", c.grid.gas_cap_kw);
  kv("gas_ef", c.grid.gas_ef);
  kv("beta", c.grid.beta);
  kv("curtail_penalty", c.grid.curtail_penalty);
  kv("price_floor", c.grid.price_floor);
  kv("price_cap", c.grid.price_cap);

  o << "\n[ga]\n";
  kvi("population", c.ga.population);
  kvi("generations", c.ga.generations);
  kv("mutation", c.ga.mutation);
  kv("crossover", c.ga.crossover);
  kv("eps", c.ga.eps);
  kvi("patience", c.ga.patience);

  return o.str();
}

void save_config(const SystemConfig& c, const std::string& dir) {
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / "config.ini");
  if (!out) throw DataError("cannot write config to " + dir);
  out << serialize_config(c);
  out.close();
  write_profile_csv((fs::path(dir) / "load_electric.csv").string(), c.profiles.load_e);
  write_profile_csv((fs::path(dir) / "load_thermal.csv").string(), c.profiles.load_h);
  write_profile_csv((fs::path(dir) / "wind_speed.csv").string(), c.profiles.wind_speed);
  write_profile_csv((fs::path(dir) / "irradiance.csv").string(), c.profiles.irradiance);
  write_profile_csv((fs::path(dir) / "outdoor_temp.csv").string(), c.profiles.outdoor);
  write_profile_csv((fs::path(dir) / "straw.csv").string(), c.profiles.straw);
  write_profile_csv((fs::path(dir) / "dry_garbage.csv").string(), c.profiles.dry_garbage);
  write_profile_csv((fs::path(dir) / "wastewater.csv").string(), c.profiles.wastewater);
  write_profile_csv((fs::path(dir) / "wet_garbage.csv").string(), c.profiles.wet_garbage);
  write_profile_csv((fs::path(dir) / "urban_load.csv").string(), c.profiles.urban_load);
  write_profile_csv((fs::path(dir) / "grid_pv.csv").string(), c.profiles.grid_pv);
}

}  // namespace ries
