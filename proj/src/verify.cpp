#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "ries/biomass.hpp"
#include "ries/carbon.hpp"
#include "ries/demand_response.hpp"
#include "ries/devices.hpp"
#include "ries/dispatch.hpp"

namespace ries {

double VerifyReport::max_balance_residual() const {
  double worst = 0.0;
  for (const auto& i : items)
    if (i.name.find("balance") != std::string::npos)
      worst = std::max(worst, std::abs(i.worst));
  return worst;
}

std::string VerifyReport::first_failure() const {
  for (const auto& i : items)
    if (!i.pass) return i.name + ": " + i.detail;
  return {};
}

namespace {

struct Checker {
  VerifyReport rep;
  CheckItem* cur = nullptr;

  void begin(const std::string& name) {
    rep.items.push_back({name, true, 0.0, ""});
    cur = &rep.items.back();
  }
  void residual(double r, double tol, const std::string& where) {
    cur->worst = std::max(cur->worst, std::abs(r));
    if (std::abs(r) > tol && cur->pass) {
      cur->pass = false;
      cur->detail = fmt::format("{} residual {:.3e}", where, r);
    }
  }
  void require(bool ok, const std::string& why, double overshoot = 0.0) {
    cur->worst = std::max(cur->worst, std::abs(overshoot));
    if (!ok && cur->pass) {
      cur->pass = false;
      cur->detail = why;
    }
  }
};

}  // namespace

VerifyReport verify_solution(const HorizonData& h, const ScenarioFlags& flags,
                             const DispatchSolution& sol, double tol) {
  const SystemConfig& c = h.cfg;
  const int T = h.T;
  const double dt = h.dt;
  const double loss = 1.0 - c.dispatch.heat_loss;
  Checker ck;

  if (sol.status != lp::Status::Optimal) {
    ck.begin("solution status");
    ck.require(false, "solution is not optimal: " + sol.infeasible_reason);
    return ck.rep;
  }

  bool bld = flags.demand_response && c.building.n_rooms > 0;
  if (bld) {
    bld = false;
    for (double v : h.heating_base) bld |= v > 1e-9;
  }
  const bool ib_on = flags.demand_response && c.dr.use_incentive;

  // Derived quantities recomputed through the device models, never read back
  // from the optimizer's own bookkeeping.
  std::vector<double> chp_e(T), chp_h(T), whb(T), gt_gas(T), gb_gas(T), eb_h(T),
      upg_out(T), b2g(T), deliver(T);
  for (int t = 0; t < T; ++t) {
    ChpOutput chp = chp_output(sol.chp_fuel[t], c.chp);
    chp_e[t] = chp.electric_kw;
    chp_h[t] = chp.heat_kw;
    ChpOutput gt = gt_output(sol.gt_e[t] / c.gt.eta_e, c.gt);
    whb[t] = gt.heat_kw;
    gt_gas[t] = sol.gt_e[t] / (c.gt.eta_e * c.gas_lhv_kwh);
    gb_gas[t] =
        gb_fuel_and_emissions(sol.gb_h[t], c.gb, c.gas_lhv_kwh, c.carbon.gas_ef_kg_nm3)
            .gas_nm3;
    eb_h[t] = eb_output(sol.eb_in[t], c.eb);
    upg_out[t] = upgrade_biogas(sol.upg_in[t], c.upgrade);
    b2g[t] = b2g_power_draw(upg_out[t], c.upgrade);
    deliver[t] = h.heating_base[t] + sol.th_shift[t] - sol.th_curtail[t];
  }

  ck.begin("electric balance");
  for (int t = 0; t < T; ++t) {
    double lhs = sol.wind[t] + sol.pv[t] + chp_e[t] + sol.gt_e[t] + sol.buy_e[t] +
                 sol.es_dis[t] - sol.es_ch[t] - sol.eb_in[t] - b2g[t] + sol.ib_dn[t] -
                 sol.ib_up[t] + sol.rep[t];
    double rhs = h.load_e[t] + h.pbdr_delta[t];
    ck.residual(lhs - rhs, tol, fmt::format("slot {}", t));
  }

  ck.begin("thermal balance");
  for (int t = 0; t < T; ++t) {
    double lhs = loss * (chp_h[t] + whb[t] + sol.gb_h[t] + eb_h[t] + sol.ts_dis[t] -
                         sol.ts_ch[t]);
    double rhs = h.load_h_fix[t] + deliver[t] + c.dr.replace_eff * sol.rep[t];
    ck.residual(lhs - rhs, tol, fmt::format("slot {}", t));
  }

  ck.begin("gas balance");
  for (int t = 0; t < T; ++t) {
    double lhs = sol.buy_gas[t] + c.upgrade.eta_b2g * sol.upg_in[t] - sol.ng_chp[t] -
                 gt_gas[t] - gb_gas[t];
    ck.residual(lhs, tol, fmt::format("slot {}", t));
  }

  ck.begin("variable bounds");
  for (int t = 0; t < T; ++t) {
    auto within = [&](double v, double lo, double hi, const std::string& what) {
      double over = std::max(lo - v, v - hi);
      ck.require(over <= tol, fmt::format("{} = {:.6f} outside [{:.6f}, {:.6f}] at slot {}",
                                          what, v, lo, hi, t),
                 std::max(0.0, over));
    };
    within(sol.wind[t], 0, h.wind_cap[t], "wind");
    within(sol.pv[t], 0, h.pv_cap[t], "pv");
    within(sol.pg_used[t], 0, h.pg_avail[t], "pyrolysis gas");
    within(sol.ng_chp[t], 0, c.upgrade.eta_b2g * sol.upg_in[t] + tol, "renewable gas draw");
    within(sol.chp_fuel[t], 0,
           std::min(c.chp.fuel_max_kwh, c.chp.cap_e_kw / std::max(c.chp.eta_e, 1e-12)),
           "cogeneration fuel");
    within(sol.gt_e[t], 0, c.gt.cap_e_kw, "turbine");
    within(sol.gb_h[t], 0, c.gb.cap_h_kw, "boiler");
    within(eb_h[t], 0, c.eb.cap_h_kw, "electric boiler");
    within(sol.buy_e[t], 0, lp::kInf, "grid purchase");
    within(sol.buy_gas[t], 0, lp::kInf, "gas purchase");
    within(sol.es_ch[t], 0, c.storage_e.p_ch_kw, "battery charge");
    within(sol.es_dis[t], 0, c.storage_e.p_dis_kw, "battery discharge");
    within(sol.ts_ch[t], 0, c.storage_h.p_ch_kw, "heat store charge");
    within(sol.ts_dis[t], 0, c.storage_h.p_dis_kw, "heat store discharge");
    within(sol.upg_in[t], 0, h.biogas_raw[t], "upgrader intake");
    within(sol.es_soc[t], 0, c.storage_e.cap_kwh, "battery level");
    within(sol.ts_soc[t], 0, c.storage_h.cap_kwh, "heat store level");
  }

  ck.begin("ramp limits");
  for (int t = 1; t < T; ++t) {
    double d1 = std::abs(chp_e[t] - chp_e[t - 1]);
    ck.require(d1 <= c.chp.ramp_kw * dt + tol,
               fmt::format("cogeneration ramp {:.3f} at slot {}", d1, t),
               std::max(0.0, d1 - c.chp.ramp_kw * dt));
    double d2 = std::abs(sol.gt_e[t] - sol.gt_e[t - 1]);
    ck.require(d2 <= c.gt.ramp_kw * dt + tol,
               fmt::format("turbine ramp {:.3f} at slot {}", d2, t),
               std::max(0.0, d2 - c.gt.ramp_kw * dt));
    double d3 = std::abs(sol.gb_h[t] - sol.gb_h[t - 1]);
    ck.require(d3 <= c.gb.ramp_kw * dt + tol,
               fmt::format("boiler ramp {:.3f} at slot {}", d3, t),
               std::max(0.0, d3 - c.gb.ramp_kw * dt));
  }

  auto check_storage = [&](const StorageParams& sp, const std::vector<double>& chv,
                           const std::vector<double>& disv, const std::vector<double>& socv,
                           const std::string& what) {
    ck.begin(what + " storage recursion");
    double q = sp.q0_kwh;
    for (int t = 0; t < T; ++t) {
      ck.require(std::min(chv[t], disv[t]) <= tol,
                 fmt::format("simultaneous charge/discharge at slot {}", t),
                 std::min(chv[t], disv[t]));
      bool stepped = true;
      try {
        q = storage_step(q, chv[t], disv[t], sp, dt);
      } catch (const DataError& e) {
        stepped = false;
        ck.require(false, fmt::format("slot {}: {}", t, e.what()));
      }
      if (!stepped) return;
      ck.residual(q - socv[t], tol, fmt::format("level at slot {}", t));
    }
    ck.residual(q - sp.q0_kwh, 1e-9 * std::max(1.0, sp.cap_kwh), "daily cycle closure");
  };
  check_storage(c.storage_e, sol.es_ch, sol.es_dis, sol.es_soc, "electric");
  check_storage(c.storage_h, sol.ts_ch, sol.ts_dis, sol.ts_soc, "thermal");

  if (c.building.n_rooms > 0) {
    ck.begin("indoor comfort");
    double temp = c.building.t_set;
    for (int t = 0; t < T; ++t) {
      temp = room_temperature_step(temp, h.t_out[t], deliver[t] / c.building.n_rooms,
                                   c.building, dt);
      ck.residual(temp - sol.t_in[t], std::max(tol, 1e-6), fmt::format("trajectory at slot {}", t));
      TempBand band = comfort_band(t, c.comfort);
      double over = std::max(band.lo_c - sol.t_in[t], sol.t_in[t] - band.hi_c);
      ck.require(over <= tol,
                 fmt::format("temperature {:.4f} outside comfort [{:.4f}, {:.4f}] at slot {}",
                             sol.t_in[t], band.lo_c, band.hi_c, t),
                 std::max(0.0, over));
      double vote = pmv(c.comfort.t_skin, sol.t_in[t], c.comfort.met, c.comfort.i_cl);
      double lo = is_daytime(t, c.comfort) ? c.comfort.day_lower : -c.comfort.night_limit;
      double hi = is_daytime(t, c.comfort) ? c.comfort.day_upper : c.comfort.night_limit;
      ck.require(vote >= lo - 1e-6 && vote <= hi + 1e-6,
                 fmt::format("comfort vote {:.4f} outside [{:.2f}, {:.2f}] at slot {}", vote,
                             lo, hi, t));
    }
    if (bld)
      ck.residual(sol.t_in[T - 1] - c.building.t_set, std::max(tol, 1e-6),
                  "daily-cyclic end state");
  }

  if (bld && T == kSlots) {
    ck.begin("thermal relief limits");
    ThermalDrLimits lim;
    std::array<double, kSlots> shift{}, curtail{};
    for (int t = 0; t < T; ++t) {
      lim.shift_max[t] = c.dr.th_shift_share * h.heating_base[t];
      lim.curtail_max[t] = c.dr.th_curtail_share * h.heating_base[t];
      shift[t] = sol.th_shift[t];
      curtail[t] = sol.th_curtail[t];
    }
    DrCheck res = thermal_dr_feasible(shift, curtail, lim, tol);
    ck.require(res.ok, res.message);
  }

  if (ib_on) {
    ck.begin("incentive caps");
    for (int t = 0; t < T; ++t) {
      double dn_cap = 0, up_cap = 0;
      for (double f : c.dr.ibdr_down_frac) dn_cap += f * c.dr.shares.reducible * h.load_e[t];
      for (double f : c.dr.ibdr_up_frac) up_cap += f * c.dr.shares.reducible * h.load_e[t];
      ck.require(sol.ib_dn[t] <= dn_cap + tol,
                 fmt::format("reduction {:.3f} above cap {:.3f} at slot {}", sol.ib_dn[t],
                             dn_cap, t),
                 std::max(0.0, sol.ib_dn[t] - dn_cap));
      ck.require(sol.ib_up[t] <= up_cap + tol,
                 fmt::format("boost {:.3f} above cap {:.3f} at slot {}", sol.ib_up[t], up_cap, t),
                 std::max(0.0, sol.ib_up[t] - up_cap));
      double rep_cap = c.dr.shares.replaceable * h.load_e[t];
      ck.require(sol.rep[t] <= rep_cap + tol,
                 fmt::format("substitution {:.3f} above cap {:.3f} at slot {}", sol.rep[t],
                             rep_cap, t),
                 std::max(0.0, sol.rep[t] - rep_cap));
    }
  }

  ck.begin("carbon ledger");
  {
    EmissionTotals em;
    double buy_kwh = 0, gb_heat = 0;
    for (int t = 0; t < T; ++t) {
      em.grid_kg += grid_purchase_emissions(sol.buy_e[t], c.carbon.grid_ef_kg_kwh, dt);
      em.gt_kg += c.carbon.gas_ef_kg_nm3 * gt_gas[t] * dt;
      em.gb_kg += c.carbon.gas_ef_kg_nm3 * gb_gas[t] * dt;
      buy_kwh += sol.buy_e[t] * dt;
      gb_heat += sol.gb_h[t] * dt;
    }
    CarbonLedger ref = settle(em, buy_kwh, gb_heat, flags.carbon_trading, c.carbon);
    auto close = [](double a, double b) {
      return std::abs(a - b) <= 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
    };
    ck.require(close(ref.e_total_kg, sol.ledger.e_total_kg),
               fmt::format("emission total mismatch {:.9f} vs {:.9f}", ref.e_total_kg,
                           sol.ledger.e_total_kg),
               ref.e_total_kg - sol.ledger.e_total_kg);
    ck.require(close(ref.quota_kg, sol.ledger.quota_kg), "allowance mismatch",
               ref.quota_kg - sol.ledger.quota_kg);
    ck.require(close(ref.cost_yuan, sol.ledger.cost_yuan), "settlement mismatch",
               ref.cost_yuan - sol.ledger.cost_yuan);
    ck.require(close(sol.cost.cet, sol.ledger.cost_yuan),
               "cost report disagrees with ledger");
  }

  ck.begin("cost identity");
  {
    double total = sol.cost.total();
    double parts = sol.cost.c_buy() + sol.cost.c_om() + sol.cost.cet;
    ck.residual(total - parts, 1e-9 * (1.0 + std::abs(total)), "decomposition");
    double buy = 0;
    for (int t = 0; t < T; ++t)
      buy += h.price_e[t] * sol.buy_e[t] * dt + c.gas_price * sol.buy_gas[t] * dt;
    ck.residual(buy - sol.cost.c_buy(), 1e-6 * (1.0 + std::abs(buy)), "purchase bill");
  }

  return ck.rep;
}

}  // namespace ries
