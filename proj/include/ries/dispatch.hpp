#pragma once
#include <optional>
#include <string>
#include <vector>

#include "ries/config.hpp"
#include "ries/lp.hpp"

namespace ries {

// Standard-normal quantile: rational approximation refined by one Newton
// step on the erfc-based CDF. Accurate to ~1e-12; antisymmetric around 0.5
// by construction.
double inverse_normal_cdf(double p);

// Inputs to one optimization horizon, already reduced to plain vectors so
// tests can build tiny instances directly. `make_horizon` fills it from a
// config (T = 24); the chance-constrained renewable caps and the exogenous
// price-elastic load shift are resolved here, before the LP sees anything.
struct HorizonData {
  int T = kSlots;
  double dt = 1.0;
  std::vector<double> load_e;        // kW
  std::vector<double> load_h_fix;    // kW, process + digester demand
  std::vector<double> heating_base;  // kW, building heating at the setpoint
  std::vector<double> price_e;       // yuan/kWh tariff per slot
  std::vector<double> wind_cap, pv_cap;    // usable caps after the chance rule
  std::vector<double> wind_fore, pv_fore;  // raw forecasts (curtailment basis)
  std::vector<double> pg_avail;      // kWh/h pyrolysis gas energy
  std::vector<double> biogas_raw;    // Nm3/h digester output
  std::vector<double> t_out;         // C
  std::vector<double> pbdr_delta;    // kW load change from the price response
  SystemConfig cfg;                  // parameter source (profiles unused here)
};

HorizonData make_horizon(const SystemConfig& cfg, const ScenarioFlags& flags,
                         const std::optional<std::array<double, kSlots>>& prices = {});

// Column bookkeeping for extraction and tests.
struct LpLayout {
  std::vector<int> wind, pv, pg_used, ng_chp, gt_e, gb_h, eb_in, buy_e, buy_g;
  std::vector<int> es_ch, es_dis, es_q, ts_ch, ts_dis, ts_q, upg_in;
  std::vector<std::vector<int>> ib_dn, ib_up;  // [tier][slot]
  std::vector<int> rep, sh_p, sh_n, cur_h, t_in;
  int e_tot = -1, x_net = -1, cet = -1;
  int n_dr_cols = 0;  // structural count of demand-response columns
};

struct BuiltLp {
  lp::Model model;
  LpLayout layout;
  // set when the instance is provably infeasible before solving
  std::string infeasible_reason;
  std::vector<std::string> row_slot_tag;  // row index -> human tag
};

BuiltLp build_lp(const HorizonData& h, const ScenarioFlags& flags);

struct CostBreakdown {
  double buy_elec = 0, buy_gas = 0;      // energy purchases
  double om = 0;                         // device operation & maintenance
  double dr_comp = 0;                    // demand-response compensation
  double curtail_pen = 0;                // spilled-renewable penalty
  double c_buy() const { return buy_elec + buy_gas; }
  double c_om() const { return om + dr_comp + curtail_pen; }
  double cet = 0;                        // carbon settlement
  double total() const { return c_buy() + c_om() + cet; }
};

struct DispatchSolution {
  lp::Status status = lp::Status::Infeasible;
  std::string infeasible_reason;
  ScenarioFlags flags;
  int T = 0;
  double dt = 1.0;

  // per-slot trajectories
  std::vector<double> wind, pv, chp_fuel, pg_used, ng_chp, chp_e, chp_h;
  std::vector<double> gt_e, gt_gas, whb_h, gb_h, gb_gas, eb_in, eb_h;
  std::vector<double> buy_e, buy_gas, es_ch, es_dis, es_soc, ts_ch, ts_dis, ts_soc;
  std::vector<double> upg_in, upg_out, b2g_e;
  std::vector<double> ib_dn, ib_up, pb_delta, rep, th_shift, th_curtail;
  std::vector<double> heat_deliver;  // building heating actually delivered
  std::vector<double> t_in;          // end-of-slot indoor temperature
  std::vector<double> price_e;

  CostBreakdown cost;
  CarbonLedger ledger;

  double lp_objective = 0;
  int lp_iterations = 0;
  double lp_residual = 0;
};

// Solves the horizon; returns a populated solution (status Optimal) or the
// diagnostic reason (never throws for infeasible instances).
DispatchSolution solve_dispatch(const HorizonData& h, const ScenarioFlags& flags);
DispatchSolution solve_dispatch(const SystemConfig& cfg, const ScenarioFlags& flags,
                                const std::optional<std::array<double, kSlots>>& prices = {});

// ---------------------------------------------------------------------------
// Independent solution audit: recomputes every balance, bound, ramp, storage
// recursion, comfort band and carbon identity from the raw trajectories.
// ---------------------------------------------------------------------------

struct CheckItem {
  std::string name;
  bool pass = true;
  double worst = 0.0;   // worst residual/overshoot seen
  std::string detail;   // first failure description
};

struct VerifyReport {
  std::vector<CheckItem> items;
  bool ok() const {
    for (const auto& i : items)
      if (!i.pass) return false;
    return true;
  }
  double max_balance_residual() const;
  std::string first_failure() const;
};

VerifyReport verify_solution(const HorizonData& h, const ScenarioFlags& flags,
                             const DispatchSolution& sol, double tol = 1e-6);

}  // namespace ries
