#include "ries/dispatch.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ries/biomass.hpp"
#include "ries/carbon.hpp"
#include "ries/demand_response.hpp"
#include "ries/devices.hpp"

namespace ries {

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DataError(fmt::format("inverse_normal_cdf: p = {} outside (0, 1)", p));
  if (p == 0.5) return 0.0;
  if (p > 0.5) return -inverse_normal_cdf(1.0 - p);  // exact antisymmetry

  // Rational initial guess (relative error ~1e-9), then two Halley updates on
  // Phi(x) - p evaluated through erfc, which stays accurate deep in the tail.
  static const double A[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double B[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double C[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double D[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
        ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
  } else {
    double q = p - 0.5, r = q * q;
    x = (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q /
        (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0);
  }
  const double sqrt2 = std::numbers::sqrt2;
  const double sqrt2pi = std::sqrt(2.0 * std::numbers::pi);
  for (int i = 0; i < 2; ++i) {
    double err = 0.5 * std::erfc(-x / sqrt2) - p;
    double u = err * sqrt2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

HorizonData make_horizon(const SystemConfig& cfg, const ScenarioFlags& flags,
                         const std::optional<std::array<double, kSlots>>& prices) {
  HorizonData h;
  h.T = kSlots;
  h.dt = 1.0;
  h.cfg = cfg;
  const Derived& d = cfg.derived;
  h.load_e.assign(kSlots, 0.0);
  h.load_h_fix.assign(kSlots, 0.0);
  h.heating_base.assign(kSlots, 0.0);
  h.price_e.assign(kSlots, 0.0);
  h.wind_fore.assign(kSlots, 0.0);
  h.pv_fore.assign(kSlots, 0.0);
  h.wind_cap.assign(kSlots, 0.0);
  h.pv_cap.assign(kSlots, 0.0);
  h.pg_avail.assign(kSlots, 0.0);
  h.biogas_raw.assign(kSlots, 0.0);
  h.t_out.assign(kSlots, 0.0);
  h.pbdr_delta.assign(kSlots, 0.0);

  // One-sided chance rule: usable renewable power is limited to the quantile
  // the forecast clears with the configured confidence. At 0.5 the cap is the
  // forecast itself; tighter confidence shaves it proportionally to sigma.
  const double z = inverse_normal_cdf(1.0 - cfg.dispatch.confidence);
  std::array<double, kSlots> tariff = prices ? *prices : cfg.tou.prices();
  for (int t = 0; t < kSlots; ++t) {
    h.load_e[t] = cfg.profiles.load_e[t];
    h.load_h_fix[t] = cfg.profiles.load_h[t] + d.digester_heat[t];
    h.heating_base[t] = d.heating_base[t];
    h.price_e[t] = tariff[t];
    h.wind_fore[t] = d.wind_fore[t];
    h.pv_fore[t] = d.pv_fore[t];
    h.wind_cap[t] = std::max(0.0, d.wind_fore[t] * (1.0 + cfg.wind.sigma_frac * z));
    h.pv_cap[t] = std::max(0.0, d.pv_fore[t] * (1.0 + cfg.pv.sigma_frac * z));
    h.pg_avail[t] = d.pg_energy[t];
    h.biogas_raw[t] = d.biogas[t];
    h.t_out[t] = cfg.profiles.outdoor[t];
  }
  if (flags.demand_response && cfg.dr.use_price) {
    Eigen::MatrixXd E = build_elasticity_matrix(cfg.tou, cfg.dr.elasticity);
    std::array<double, kSlots> ref;
    ref.fill(cfg.dr.reference_price);
    std::array<double, kSlots> delta = pbdr_adjustment(
        cfg.profiles.load_e.v, tariff, ref, E, cfg.dr.shares.transferable);
    for (int t = 0; t < kSlots; ++t) h.pbdr_delta[t] = delta[t];
  }
  return h;
}

namespace {

// Per-slot constants derived once for row assembly.
struct Coef {
  double chp_e;        // electric output per unit fuel power
  double chp_h;        // heat output per unit fuel power
  double gt_whb;       // recovered heat per kWh electric
  double gt_gas;       // Nm3 per kWh electric
  double eb_h;         // heat per kWh input
  double b2g_e;        // parasitic kW per raw Nm3/h upgraded
  double upg_eff;      // product Nm3 per raw Nm3
  int n_gb_seg;        // boiler fuel curve segments
  std::vector<double> gb_seg_cap, gb_seg_slope;  // Nm3 per kWh heat, per segment
};

Coef make_coef(const SystemConfig& c) {
  Coef k{};
  k.chp_e = c.chp.eta_e;
  k.chp_h = c.chp.eta_h;
  k.gt_whb = c.gt.eta_h / c.gt.eta_e;
  k.gt_gas = 1.0 / (c.gt.eta_e * c.gas_lhv_kwh);
  k.eb_h = c.eb.eta;
  k.upg_eff = c.upgrade.eta_b2g;
  k.b2g_e = c.upgrade.power_kwh_per_nm3 * c.upgrade.eta_b2g;
  const double b = gb_fuel_slope(c.gb, c.gas_lhv_kwh);
  if (c.gb.fuel_a > 0.0 && c.gb.cap_h_kw > 0.0) {
    // chord slopes of the quadratic fuel curve: exact on each segment and
    // increasing, so the LP fills segments in order automatically
    k.n_gb_seg = 8;
    double w = c.gb.cap_h_kw / k.n_gb_seg;
    for (int s = 0; s < k.n_gb_seg; ++s) {
      k.gb_seg_cap.push_back(w);
      k.gb_seg_slope.push_back(c.gb.fuel_a * (2 * s + 1) * w + b);
    }
  } else {
    k.n_gb_seg = 1;
    k.gb_seg_cap.push_back(c.gb.cap_h_kw);
    k.gb_seg_slope.push_back(b);
  }
  return k;
}

bool building_active(const HorizonData& h) {
  if (h.cfg.building.n_rooms <= 0) return false;
  for (double v : h.heating_base)
    if (v > 1e-9) return true;
  return false;
}

std::string thermal_capacity_check(const HorizonData& h, const ScenarioFlags& flags,
                                   const Coef& k) {
  const SystemConfig& c = h.cfg;
  for (int t = 0; t < h.T; ++t) {
    double fuel_cap = std::min(c.chp.fuel_max_kwh,
                               c.chp.eta_e > 0 ? c.chp.cap_e_kw / c.chp.eta_e : 0.0);
    double chp_fuel = std::min(fuel_cap, h.pg_avail[t] +
                                             c.gas_lhv_kwh * k.upg_eff * h.biogas_raw[t]);
    double supply = k.chp_h * chp_fuel + k.gt_whb * c.gt.cap_e_kw + c.gb.cap_h_kw +
                    c.eb.cap_h_kw + c.storage_h.p_dis_kw;
    supply *= (1.0 - c.dispatch.heat_loss);
    double demand = h.load_h_fix[t] + h.heating_base[t];
    if (flags.demand_response)
      demand -= h.heating_base[t] * (c.dr.th_curtail_share + c.dr.th_shift_share);
    if (demand > supply + 1e-6)
      return fmt::format(
          "thermal demand {:.1f} kW at slot {} exceeds deliverable capacity {:.1f} kW",
          demand, t, supply);
  }
  return {};
}

}  // namespace

BuiltLp build_lp(const HorizonData& h, const ScenarioFlags& flags) {
  const SystemConfig& c = h.cfg;
  const Coef k = make_coef(c);
  const int T = h.T;
  const double dt = h.dt;
  BuiltLp out;
  out.infeasible_reason = thermal_capacity_check(h, flags, k);
  lp::Model& m = out.model;
  LpLayout& L = out.layout;

  const bool dr = flags.demand_response;
  const bool ib_on = dr && c.dr.use_incentive;
  const bool bld = dr && building_active(h);
  const double pen = c.dispatch.curtail_penalty;
  const double loss = 1.0 - c.dispatch.heat_loss;

  auto vec = [T](std::vector<int>& v) { v.assign(T, -1); };
  vec(L.wind), vec(L.pv), vec(L.pg_used), vec(L.ng_chp), vec(L.gt_e), vec(L.gb_h);
  vec(L.eb_in), vec(L.buy_e), vec(L.buy_g), vec(L.es_ch), vec(L.es_dis), vec(L.ts_ch);
  vec(L.ts_dis), vec(L.upg_in);
  L.es_q.assign(std::max(0, T - 1), -1);
  L.ts_q.assign(std::max(0, T - 1), -1);

  // ---- columns ------------------------------------------------------------
  for (int t = 0; t < T; ++t) {
    const std::string s = std::to_string(t);
    L.wind[t] = m.add_col("wt" + s, 0, h.wind_cap[t],
                          (c.wind.om_yuan_kwh - pen) * dt);
    L.pv[t] = m.add_col("pv" + s, 0, h.pv_cap[t], (c.pv.om_yuan_kwh - pen) * dt);
    L.pg_used[t] = m.add_col("pg" + s, 0, h.pg_avail[t],
                             c.chp.om_yuan_kwh * k.chp_e * dt);
    L.ng_chp[t] = m.add_col("ngchp" + s, 0, lp::kInf,
                            c.chp.om_yuan_kwh * k.chp_e * c.gas_lhv_kwh * dt);
    L.gt_e[t] = m.add_col("gt" + s, 0, c.gt.cap_e_kw, c.gt.om_yuan_kwh * dt);
    // boiler heat: first segment doubles as the whole unit when the curve is
    // linear; extra segments are appended right after and summed on extraction
    L.gb_h[t] = m.add_col("gb" + s + "_0", 0, k.gb_seg_cap[0], c.gb.om_yuan_kwh * dt);
    for (int g = 1; g < k.n_gb_seg; ++g)
      m.add_col(fmt::format("gb{}_{}", t, g), 0, k.gb_seg_cap[g], c.gb.om_yuan_kwh * dt);
    L.eb_in[t] = m.add_col("eb" + s, 0,
                           c.eb.eta > 0 ? c.eb.cap_h_kw / c.eb.eta : 0.0,
                           c.eb.om_yuan_kwh * k.eb_h * dt);
    L.buy_e[t] = m.add_col("buye" + s, 0, lp::kInf, (h.price_e[t] + 1e-9) * dt);
    L.buy_g[t] = m.add_col("buyg" + s, 0, lp::kInf, c.gas_price * dt);
    L.es_ch[t] = m.add_col("esc" + s, 0, c.storage_e.p_ch_kw, c.storage_e.om_yuan_kwh * dt);
    L.es_dis[t] = m.add_col("esd" + s, 0, c.storage_e.p_dis_kw, c.storage_e.om_yuan_kwh * dt);
    L.ts_ch[t] = m.add_col("tsc" + s, 0, c.storage_h.p_ch_kw, c.storage_h.om_yuan_kwh * dt);
    L.ts_dis[t] = m.add_col("tsd" + s, 0, c.storage_h.p_dis_kw, c.storage_h.om_yuan_kwh * dt);
    L.upg_in[t] = m.add_col("upg" + s, 0, h.biogas_raw[t], 0.0);
  }
  for (int t = 0; t + 1 < T; ++t) {
    L.es_q[t] = m.add_col("esq" + std::to_string(t), 0, c.storage_e.cap_kwh, 0.0);
    L.ts_q[t] = m.add_col("tsq" + std::to_string(t), 0, c.storage_h.cap_kwh, 0.0);
  }

  const int first_dr_col = m.num_cols();
  if (ib_on) {
    L.ib_dn.resize(c.dr.ibdr_down_price.size());
    L.ib_up.resize(c.dr.ibdr_up_price.size());
    for (size_t i = 0; i < L.ib_dn.size(); ++i) {
      vec(L.ib_dn[i]);
      for (int t = 0; t < T; ++t)
        L.ib_dn[i][t] = m.add_col(fmt::format("ibd{}_{}", i, t), 0,
                                  c.dr.ibdr_down_frac[i] * c.dr.shares.reducible *
                                      h.load_e[t],
                                  c.dr.ibdr_down_price[i] * dt);
    }
    for (size_t i = 0; i < L.ib_up.size(); ++i) {
      vec(L.ib_up[i]);
      for (int t = 0; t < T; ++t)
        L.ib_up[i][t] = m.add_col(fmt::format("ibu{}_{}", i, t), 0,
                                  c.dr.ibdr_up_frac[i] * c.dr.shares.reducible *
                                      h.load_e[t],
                                  c.dr.ibdr_up_price[i] * dt);
    }
    vec(L.rep);
    for (int t = 0; t < T; ++t)
      L.rep[t] = m.add_col("rep" + std::to_string(t), 0,
                           c.dr.shares.replaceable * h.load_e[t],
                           c.dr.replace_price * dt);
  }
  if (bld) {
    vec(L.sh_p), vec(L.sh_n), vec(L.cur_h), vec(L.t_in);
    for (int t = 0; t < T; ++t) {
      double sh_cap = c.dr.th_shift_share * h.heating_base[t];
      double cur_cap = c.dr.th_curtail_share * h.heating_base[t];
      // the 1e-6 on the shift pair is a degeneracy guard so opposing shifts
      // never appear in the same slot
      L.sh_p[t] = m.add_col("shp" + std::to_string(t), 0, sh_cap, 1e-6 * dt);
      L.sh_n[t] = m.add_col("shn" + std::to_string(t), 0, sh_cap, 1e-6 * dt);
      L.cur_h[t] = m.add_col("cur" + std::to_string(t), 0, cur_cap,
                             c.dr.th_curtail_price * dt);
    }
    for (int t = 0; t < T; ++t) {
      TempBand band = comfort_band(t, c.comfort);
      double lo = band.lo_c, hi = band.hi_c;
      if (t == T - 1) lo = hi = c.building.t_set;  // daily-cyclic indoor state
      L.t_in[t] = m.add_col("tin" + std::to_string(t), lo, hi, 0.0);
    }
  }
  L.n_dr_cols = m.num_cols() - first_dr_col;

  L.e_tot = m.add_col("etot", 0, lp::kInf, 1e-6);
  if (flags.carbon_trading) {
    L.x_net = m.add_col("xnet", -lp::kInf, lp::kInf, 0.0);
    L.cet = m.add_col("cet", -lp::kInf, lp::kInf, 1.0);
  } else if (c.carbon.baseline == CarbonBaseline::Flat) {
    m.add_cost(L.e_tot, c.carbon.base_price);
  }

  // ---- rows ---------------------------------------------------------------
  auto tag = [&out](std::string s) { out.row_slot_tag.push_back(std::move(s)); };

  for (int t = 0; t < T; ++t) {
    lp::Model::RowDef r;
    r.sense = lp::Sense::EQ;
    r.rhs = h.load_e[t] + h.pbdr_delta[t];
    r.name = "elec" + std::to_string(t);
    r.coef = {{L.wind[t], 1.0},
              {L.pv[t], 1.0},
              {L.pg_used[t], k.chp_e},
              {L.ng_chp[t], k.chp_e * c.gas_lhv_kwh},
              {L.gt_e[t], 1.0},
              {L.buy_e[t], 1.0},
              {L.es_dis[t], 1.0},
              {L.es_ch[t], -1.0},
              {L.eb_in[t], -1.0},
              {L.upg_in[t], -k.b2g_e}};
    if (ib_on) {
      for (auto& tier : L.ib_dn) r.coef.push_back({tier[t], 1.0});
      for (auto& tier : L.ib_up) r.coef.push_back({tier[t], -1.0});
      r.coef.push_back({L.rep[t], 1.0});
    }
    m.add_row(r);
    tag(fmt::format("electric balance at slot {}", t));
  }

  for (int t = 0; t < T; ++t) {
    lp::Model::RowDef r;
    r.sense = lp::Sense::EQ;
    r.rhs = h.load_h_fix[t] + h.heating_base[t];
    r.name = "heat" + std::to_string(t);
    r.coef = {{L.pg_used[t], loss * k.chp_h},
              {L.ng_chp[t], loss * k.chp_h * c.gas_lhv_kwh},
              {L.gt_e[t], loss * k.gt_whb},
              {L.eb_in[t], loss * k.eb_h},
              {L.ts_dis[t], loss},
              {L.ts_ch[t], -loss}};
    for (int g = 0; g < k.n_gb_seg; ++g) r.coef.push_back({L.gb_h[t] + g, loss});
    if (bld) {
      r.coef.push_back({L.sh_p[t], -1.0});
      r.coef.push_back({L.sh_n[t], 1.0});
      r.coef.push_back({L.cur_h[t], 1.0});
    }
    if (ib_on) r.coef.push_back({L.rep[t], -c.dr.replace_eff});
    m.add_row(r);
    tag(fmt::format("thermal balance at slot {}", t));
  }

  for (int t = 0; t < T; ++t) {
    lp::Model::RowDef r;
    r.sense = lp::Sense::EQ;
    r.rhs = c.gb.fuel_c;  // standby draw of the boiler fuel curve
    r.name = "gas" + std::to_string(t);
    r.coef = {{L.buy_g[t], 1.0},
              {L.upg_in[t], k.upg_eff},
              {L.ng_chp[t], -1.0},
              {L.gt_e[t], -k.gt_gas}};
    for (int g = 0; g < k.n_gb_seg; ++g)
      r.coef.push_back({L.gb_h[t] + g, -k.gb_seg_slope[g]});
    m.add_row(r);
    tag(fmt::format("gas balance at slot {}", t));
  }

  const double chp_fuel_cap =
      std::min(c.chp.fuel_max_kwh,
               c.chp.eta_e > 0 ? c.chp.cap_e_kw / c.chp.eta_e : c.chp.fuel_max_kwh);
  for (int t = 0; t < T; ++t) {
    m.add_row({lp::Sense::LE,
               chp_fuel_cap,
               "chpcap" + std::to_string(t),
               {{L.pg_used[t], 1.0}, {L.ng_chp[t], c.gas_lhv_kwh}}});
    tag(fmt::format("cogeneration fuel cap at slot {}", t));
    m.add_row({lp::Sense::LE,
               0.0,
               "chpng" + std::to_string(t),
               {{L.ng_chp[t], 1.0}, {L.upg_in[t], -k.upg_eff}}});
    tag(fmt::format("renewable-gas ceiling at slot {}", t));
  }

  auto ramp_pair = [&](int col_prev, int col_cur, double scale, double limit,
                       const std::string& name, const std::string& what, int t) {
    m.add_row({lp::Sense::LE, limit, name + "u",
               {{col_cur, scale}, {col_prev, -scale}}});
    tag(fmt::format("{} ramp-up into slot {}", what, t));
    m.add_row({lp::Sense::LE, limit, name + "d",
               {{col_cur, -scale}, {col_prev, scale}}});
    tag(fmt::format("{} ramp-down into slot {}", what, t));
  };
  for (int t = 1; t < T; ++t) {
    const std::string s = std::to_string(t);
    // cogeneration ramp measured on the electric side; fuel = pg + lhv*ng
    m.add_row({lp::Sense::LE, c.chp.ramp_kw * dt, "chpru" + s,
               {{L.pg_used[t], k.chp_e},
                {L.ng_chp[t], k.chp_e * c.gas_lhv_kwh},
                {L.pg_used[t - 1], -k.chp_e},
                {L.ng_chp[t - 1], -k.chp_e * c.gas_lhv_kwh}}});
    tag(fmt::format("cogeneration ramp-up into slot {}", t));
    m.add_row({lp::Sense::LE, c.chp.ramp_kw * dt, "chprd" + s,
               {{L.pg_used[t], -k.chp_e},
                {L.ng_chp[t], -k.chp_e * c.gas_lhv_kwh},
                {L.pg_used[t - 1], k.chp_e},
                {L.ng_chp[t - 1], k.chp_e * c.gas_lhv_kwh}}});
    tag(fmt::format("cogeneration ramp-down into slot {}", t));
    ramp_pair(L.gt_e[t - 1], L.gt_e[t], 1.0, c.gt.ramp_kw * dt, "gtr" + s,
              "turbine", t);
    if (k.n_gb_seg == 1) {
      ramp_pair(L.gb_h[t - 1], L.gb_h[t], 1.0, c.gb.ramp_kw * dt, "gbr" + s,
                "boiler", t);
    } else {
      lp::Model::RowDef up{lp::Sense::LE, c.gb.ramp_kw * dt, "gbru" + s, {}};
      lp::Model::RowDef dn{lp::Sense::LE, c.gb.ramp_kw * dt, "gbrd" + s, {}};
      for (int g = 0; g < k.n_gb_seg; ++g) {
        up.coef.push_back({L.gb_h[t] + g, 1.0});
        up.coef.push_back({L.gb_h[t - 1] + g, -1.0});
        dn.coef.push_back({L.gb_h[t] + g, -1.0});
        dn.coef.push_back({L.gb_h[t - 1] + g, 1.0});
      }
      m.add_row(up);
      tag(fmt::format("boiler ramp-up into slot {}", t));
      m.add_row(dn);
      tag(fmt::format("boiler ramp-down into slot {}", t));
    }
  }

  // Storage recursion with the final state eliminated: the slot T-1 row wires
  // the last charge/discharge directly to the initial level, so the cycle
  // closes exactly by construction.
  auto soc_rows = [&](const StorageParams& sp, const std::vector<int>& ch,
                      const std::vector<int>& dis, const std::vector<int>& q,
                      const std::string& prefix, const std::string& what) {
    for (int t = 0; t < T; ++t) {
      lp::Model::RowDef r;
      r.sense = lp::Sense::EQ;
      r.name = prefix + std::to_string(t);
      double flow_ch = sp.eta_ch * dt;
      double flow_dis = (sp.eta_dis > 0 ? 1.0 / sp.eta_dis : 0.0) * dt;
      if (T == 1) {
        r.rhs = 0.0;
        r.coef = {{ch[t], flow_ch}, {dis[t], -flow_dis}};
      } else if (t == 0) {
        r.rhs = sp.q0_kwh;
        r.coef = {{q[0], 1.0}, {ch[0], -flow_ch}, {dis[0], flow_dis}};
      } else if (t < T - 1) {
        r.rhs = 0.0;
        r.coef = {{q[t], 1.0}, {q[t - 1], -1.0}, {ch[t], -flow_ch}, {dis[t], flow_dis}};
      } else {
        r.rhs = -sp.q0_kwh;
        r.coef = {{q[t - 1], -1.0}, {ch[t], -flow_ch}, {dis[t], flow_dis}};
      }
      m.add_row(r);
      tag(fmt::format("{} storage level at slot {}", what, t));
    }
  };
  soc_rows(c.storage_e, L.es_ch, L.es_dis, L.es_q, "esq", "electric");
  soc_rows(c.storage_h, L.ts_ch, L.ts_dis, L.ts_q, "tsq", "thermal");

  if (bld) {
    const double n = c.building.n_rooms;
    const double C = c.building.c_kwh_c;
    const double K = c.building.k_f_kw_c;
    const double a = 1.0 - dt * K / C;
    for (int t = 0; t < T; ++t) {
      lp::Model::RowDef r;
      r.sense = lp::Sense::EQ;
      r.name = "tin" + std::to_string(t);
      double dr_gain = dt / (C * n);
      r.coef = {{L.t_in[t], 1.0},
                {L.sh_p[t], -dr_gain},
                {L.sh_n[t], dr_gain},
                {L.cur_h[t], dr_gain}};
      if (t == 0) {
        r.rhs = c.building.t_set +
                (dt / C) * (h.heating_base[0] / n - K * (c.building.t_set - h.t_out[0]));
      } else {
        r.coef.push_back({L.t_in[t - 1], -a});
        r.rhs = (dt / C) * (h.heating_base[t] / n + K * h.t_out[t]);
      }
      m.add_row(r);
      tag(fmt::format("indoor temperature recursion at slot {}", t));
    }
    lp::Model::RowDef bal{lp::Sense::EQ, 0.0, "shsum", {}};
    for (int t = 0; t < T; ++t) {
      bal.coef.push_back({L.sh_p[t], 1.0});
      bal.coef.push_back({L.sh_n[t], -1.0});
    }
    m.add_row(bal);
    tag("daily heating shift balance");
  }

  {
    // emission bookkeeping: e_tot equals grid purchases at the grid factor
    // plus all fossil gas burned in the turbine and boiler
    lp::Model::RowDef r;
    r.sense = lp::Sense::EQ;
    r.name = "etot";
    r.rhs = c.carbon.gas_ef_kg_nm3 * c.gb.fuel_c * dt * T;
    r.coef.push_back({L.e_tot, 1.0});
    for (int t = 0; t < T; ++t) {
      r.coef.push_back({L.buy_e[t], -c.carbon.grid_ef_kg_kwh * dt});
      r.coef.push_back({L.gt_e[t], -c.carbon.gas_ef_kg_nm3 * k.gt_gas * dt});
      for (int g = 0; g < k.n_gb_seg; ++g)
        r.coef.push_back({L.gb_h[t] + g, -c.carbon.gas_ef_kg_nm3 * k.gb_seg_slope[g] * dt});
    }
    m.add_row(r);
    tag("emission accounting");
  }

  if (flags.carbon_trading) {
    lp::Model::RowDef r;
    r.sense = lp::Sense::EQ;
    r.rhs = 0.0;
    r.name = "xnet";
    r.coef.push_back({L.x_net, 1.0});
    r.coef.push_back({L.e_tot, -1.0});
    for (int t = 0; t < T; ++t) {
      r.coef.push_back({L.buy_e[t], c.carbon.quota_elec * dt});
      for (int g = 0; g < k.n_gb_seg; ++g)
        r.coef.push_back({L.gb_h[t] + g, c.carbon.quota_gas * dt});
    }
    m.add_row(r);
    tag("allowance accounting");
    for (const AffinePiece& p : epigraph_pieces(c.carbon)) {
      m.add_row({lp::Sense::GE, p.intercept, "cet",
                 {{L.cet, 1.0}, {L.x_net, -p.slope}}});
      tag("trading cost epigraph");
    }
  }

  m.obj_const = pen * dt *
                (std::accumulate(h.wind_cap.begin(), h.wind_cap.end(), 0.0) +
                 std::accumulate(h.pv_cap.begin(), h.pv_cap.end(), 0.0));
  m.validate();
  return out;
}

namespace {

double col_val(const lp::Solution& s, int idx) {
  if (idx < 0) return 0.0;
  double v = s.x[idx];
  // Snap simplex round-off residue on lower-bounded columns to exactly zero
  // so downstream recursions (storage_step) never see -1e-13 W.
  return (v < 0.0 && v > -1e-7) ? 0.0 : v;
}

}  // namespace

DispatchSolution solve_dispatch(const HorizonData& h, const ScenarioFlags& flags) {
  const SystemConfig& c = h.cfg;
  const Coef k = make_coef(c);
  const int T = h.T;
  const double dt = h.dt;

  DispatchSolution sol;
  sol.flags = flags;
  sol.T = T;
  sol.dt = dt;
  sol.price_e = h.price_e;

  BuiltLp built = build_lp(h, flags);
  if (!built.infeasible_reason.empty()) {
    sol.status = lp::Status::Infeasible;
    sol.infeasible_reason = built.infeasible_reason;
    return sol;
  }

  lp::SolveOptions opt;
  lp::Solution ls = lp::solve(built.model, opt);
  sol.status = ls.status;
  sol.lp_iterations = ls.iterations + ls.phase1_iterations;
  sol.lp_residual = ls.max_residual;
  sol.lp_objective = ls.obj;
  if (ls.status != lp::Status::Optimal) {
    if (ls.status == lp::Status::Infeasible) {
      std::string what = "constraint system";
      if (ls.infeasible_row >= 0 &&
          ls.infeasible_row < (int)built.row_slot_tag.size())
        what = built.row_slot_tag[ls.infeasible_row];
      sol.infeasible_reason = fmt::format("no feasible dispatch: {} cannot be met", what);
    } else {
      sol.infeasible_reason = fmt::format("optimizer stopped: {}", lp::status_name(ls.status));
    }
    return sol;
  }

  const LpLayout& L = built.layout;
  auto grab = [&](const std::vector<int>& idx) {
    std::vector<double> v(T, 0.0);
    for (int t = 0; t < T; ++t) v[t] = col_val(ls, idx.empty() ? -1 : idx[t]);
    return v;
  };
  sol.wind = grab(L.wind);
  sol.pv = grab(L.pv);
  sol.pg_used = grab(L.pg_used);
  sol.ng_chp = grab(L.ng_chp);
  sol.gt_e = grab(L.gt_e);
  sol.eb_in = grab(L.eb_in);
  sol.buy_e = grab(L.buy_e);
  sol.buy_gas = grab(L.buy_g);
  sol.es_ch = grab(L.es_ch);
  sol.es_dis = grab(L.es_dis);
  sol.ts_ch = grab(L.ts_ch);
  sol.ts_dis = grab(L.ts_dis);
  sol.upg_in = grab(L.upg_in);

  sol.gb_h.assign(T, 0.0);
  for (int t = 0; t < T; ++t)
    for (int g = 0; g < k.n_gb_seg; ++g) sol.gb_h[t] += ls.x[L.gb_h[t] + g];

  sol.chp_fuel.assign(T, 0.0);
  sol.chp_e.assign(T, 0.0);
  sol.chp_h.assign(T, 0.0);
  sol.gt_gas.assign(T, 0.0);
  sol.whb_h.assign(T, 0.0);
  sol.gb_gas.assign(T, 0.0);
  sol.eb_h.assign(T, 0.0);
  sol.upg_out.assign(T, 0.0);
  sol.b2g_e.assign(T, 0.0);
  sol.es_soc.assign(T, 0.0);
  sol.ts_soc.assign(T, 0.0);
  for (int t = 0; t < T; ++t) {
    sol.chp_fuel[t] = sol.pg_used[t] + c.gas_lhv_kwh * sol.ng_chp[t];
    ChpOutput chp = chp_output(sol.chp_fuel[t], c.chp);
    sol.chp_e[t] = chp.electric_kw;
    sol.chp_h[t] = chp.heat_kw;
    sol.gt_gas[t] = k.gt_gas * sol.gt_e[t];
    sol.whb_h[t] = k.gt_whb * sol.gt_e[t];
    sol.gb_gas[t] = gb_fuel_and_emissions(sol.gb_h[t], c.gb, c.gas_lhv_kwh,
                                          c.carbon.gas_ef_kg_nm3)
                        .gas_nm3;
    sol.eb_h[t] = eb_output(sol.eb_in[t], c.eb);
    sol.upg_out[t] = upgrade_biogas(sol.upg_in[t], c.upgrade);
    sol.b2g_e[t] = b2g_power_draw(sol.upg_out[t], c.upgrade);
    sol.es_soc[t] = (t + 1 < T) ? ls.x[L.es_q[t]] : c.storage_e.q0_kwh;
    sol.ts_soc[t] = (t + 1 < T) ? ls.x[L.ts_q[t]] : c.storage_h.q0_kwh;
  }

  sol.pb_delta = h.pbdr_delta;
  sol.ib_dn.assign(T, 0.0);
  sol.ib_up.assign(T, 0.0);
  sol.rep.assign(T, 0.0);
  sol.th_shift.assign(T, 0.0);
  sol.th_curtail.assign(T, 0.0);
  sol.heat_deliver = h.heating_base;
  double dr_comp = 0.0;
  if (!L.ib_dn.empty() || !L.ib_up.empty()) {
    for (int t = 0; t < T; ++t) {
      for (size_t i = 0; i < L.ib_dn.size(); ++i) {
        double v = ls.x[L.ib_dn[i][t]];
        sol.ib_dn[t] += v;
        dr_comp += c.dr.ibdr_down_price[i] * v * dt;
      }
      for (size_t i = 0; i < L.ib_up.size(); ++i) {
        double v = ls.x[L.ib_up[i][t]];
        sol.ib_up[t] += v;
        dr_comp += c.dr.ibdr_up_price[i] * v * dt;
      }
      double r = ls.x[L.rep[t]];
      sol.rep[t] = r;
      dr_comp += c.dr.replace_price * r * dt;
    }
  }
  if (!L.sh_p.empty()) {
    for (int t = 0; t < T; ++t) {
      sol.th_shift[t] = ls.x[L.sh_p[t]] - ls.x[L.sh_n[t]];
      sol.th_curtail[t] = ls.x[L.cur_h[t]];
      sol.heat_deliver[t] = h.heating_base[t] + sol.th_shift[t] - sol.th_curtail[t];
      dr_comp += c.dr.th_curtail_price * sol.th_curtail[t] * dt;
    }
  }

  sol.t_in.assign(T, c.building.t_set);
  if (!L.t_in.empty()) {
    for (int t = 0; t < T; ++t) sol.t_in[t] = ls.x[L.t_in[t]];
  } else if (c.building.n_rooms > 0) {
    double temp = c.building.t_set;
    for (int t = 0; t < T; ++t) {
      temp = room_temperature_step(temp, h.t_out[t],
                                   sol.heat_deliver[t] / c.building.n_rooms,
                                   c.building, dt);
      sol.t_in[t] = temp;
    }
  }

  // Cost report rebuilt from the trajectories so tie-break epsilons in the LP
  // objective never leak into the published numbers.
  CostBreakdown& cb = sol.cost;
  double om = 0.0;
  double buy_kwh = 0.0, gb_heat_kwh = 0.0;
  EmissionTotals em;
  for (int t = 0; t < T; ++t) {
    cb.buy_elec += h.price_e[t] * sol.buy_e[t] * dt;
    cb.buy_gas += c.gas_price * sol.buy_gas[t] * dt;
    om += c.wind.om_yuan_kwh * sol.wind[t] * dt + c.pv.om_yuan_kwh * sol.pv[t] * dt +
          c.chp.om_yuan_kwh * sol.chp_e[t] * dt + c.gt.om_yuan_kwh * sol.gt_e[t] * dt +
          c.gb.om_yuan_kwh * sol.gb_h[t] * dt + c.eb.om_yuan_kwh * sol.eb_h[t] * dt +
          c.storage_e.om_yuan_kwh * (sol.es_ch[t] + sol.es_dis[t]) * dt +
          c.storage_h.om_yuan_kwh * (sol.ts_ch[t] + sol.ts_dis[t]) * dt;
    cb.curtail_pen += c.dispatch.curtail_penalty * dt *
                      ((h.wind_cap[t] - sol.wind[t]) + (h.pv_cap[t] - sol.pv[t]));
    buy_kwh += sol.buy_e[t] * dt;
    gb_heat_kwh += sol.gb_h[t] * dt;
    em.grid_kg += grid_purchase_emissions(sol.buy_e[t], c.carbon.grid_ef_kg_kwh, dt);
    em.gt_kg += c.carbon.gas_ef_kg_nm3 * sol.gt_gas[t] * dt;
    em.gb_kg += c.carbon.gas_ef_kg_nm3 * sol.gb_gas[t] * dt;
  }
  cb.om = om;
  cb.dr_comp = dr_comp;
  sol.ledger = settle(em, buy_kwh, gb_heat_kwh, flags.carbon_trading, c.carbon);
  cb.cet = sol.ledger.cost_yuan;
  return sol;
}

DispatchSolution solve_dispatch(const SystemConfig& cfg, const ScenarioFlags& flags,
                                const std::optional<std::array<double, kSlots>>& prices) {
  return solve_dispatch(make_horizon(cfg, flags, prices), flags);
}

}  // namespace ries
