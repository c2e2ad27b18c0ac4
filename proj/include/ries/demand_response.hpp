#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ries/common.hpp"
#include "ries/tou.hpp"

namespace ries {

// ---------------------------------------------------------------------------
// Storage
// ---------------------------------------------------------------------------

struct StorageParams {
  double cap_kwh = 0.0;
  double p_ch_kw = 0.0;
  double p_dis_kw = 0.0;
  double eta_ch = 0.90;
  double eta_dis = 0.90;
  double q0_kwh = 0.0;  // initial state of charge; daily cycle returns to it
  double om_yuan_kwh = 0.005;
};

// One-step state-of-charge recursion. Throws DataError when the result (or a
// negative input) violates [0, cap]; caller decides whether both ch and dis
// being positive is legal (the solution checker forbids it).
double storage_step(double q_kwh, double ch_kw, double dis_kw,
                    const StorageParams& p, double dt_h = 1.0);

// ---------------------------------------------------------------------------
// Price-based response (elastic load shifting)
// ---------------------------------------------------------------------------

struct DrShares {
  double fixed = 0.40;
  double transferable = 0.35;  // price-elastic
  double reducible = 0.20;     // enrolled in incentive offers
  double replaceable = 0.05;   // can substitute electricity with heat
};

struct ElasticityParams {
  double self = -0.2;   // own-price elasticity (diagonal)
  double cross = 0.03;  // between different tariff-period classes
};

// 24x24 elasticity matrix built from the reference tariff's period classes:
// diagonal = self, off-diagonal = cross when the two slots belong to
// different period classes, 0 within the same class.
Eigen::MatrixXd build_elasticity_matrix(const TouPriceSchedule& ref,
                                        const ElasticityParams& ep);

// Load change per slot for the price-elastic share:
//   dL_t = share * L0_t * sum_s E(t,s) * (P_s - Pref_s) / Pref_s
std::array<double, kSlots> pbdr_adjustment(const std::array<double, kSlots>& base_load,
                                           const std::array<double, kSlots>& price,
                                           const std::array<double, kSlots>& ref_price,
                                           const Eigen::MatrixXd& elasticity,
                                           double eligible_share);

// ---------------------------------------------------------------------------
// Incentive-based response (tiered offers)
// ---------------------------------------------------------------------------

struct IbdrTier {
  double price_yuan_kwh = 0.0;
  double max_kwh = 0.0;
};

struct IbdrOffer {
  double contract_kwh = 0.0;           // pre-agreed block, settled separately
  std::vector<IbdrTier> down;          // load-reduction tiers
  std::vector<IbdrTier> up;            // load-increase tiers
};

struct IbdrResult {
  double delivered_kwh = 0.0;  // magnitude actually scheduled
  double compensation_yuan = 0.0;
};

// Fill tiers cheapest-first until the request or the offer saturates.
// requested_kwh > 0 asks for load reduction (down tiers), < 0 for increase.
IbdrResult ibdr_response(const IbdrOffer& offer, double requested_kwh);

// ---------------------------------------------------------------------------
// Thermal comfort
// ---------------------------------------------------------------------------

struct ComfortParams {
  double t_skin = 33.5;  // C
  double met = 20.0;     // metabolic scale in the simplified vote model
  double i_cl = 0.9;     // clothing insulation, clo
  double night_limit = 0.9;   // |vote| bound while asleep
  double day_upper = 0.5;     // tighter warm-side bound while active
  double day_lower = -0.9;
  int day_start = 7;   // first daytime slot
  int day_end = 18;    // last daytime slot (inclusive)
};

// Simplified predicted-mean-vote: increasing in indoor temperature.
double pmv(double t_skin, double t_in, double met, double i_cl);

bool is_daytime(int slot, const ComfortParams& cp);

struct TempBand {
  double lo_c = 0.0;
  double hi_c = 0.0;
};

// Indoor-temperature band whose endpoints hit the slot's vote limits.
// Inverted numerically (bisection) — keeps working if the vote model changes.
TempBand comfort_band(int slot, const ComfortParams& cp);

// ---------------------------------------------------------------------------
// Building thermal dynamics
// ---------------------------------------------------------------------------

struct BuildingParams {
  double n_rooms = 400.0;
  double k_f_kw_c = 0.25;   // per-room envelope loss, kW/C
  double c_kwh_c = 10.0;    // per-room effective heat capacity, kWh/C
  double t_set = 20.0;      // reference setpoint the base heating tracks
};

// Forward-Euler room temperature update for one slot.
double room_temperature_step(double t_in, double t_out, double heat_kw_per_room,
                             const BuildingParams& bp, double dt_h = 1.0);

// ---------------------------------------------------------------------------
// Thermal-side DR feasibility
// ---------------------------------------------------------------------------

struct ThermalDrLimits {
  std::array<double, kSlots> shift_max{};    // |shift_t| bound, kW
  std::array<double, kSlots> curtail_max{};  // curtailment cap, kW
};

struct DrCheck {
  bool ok = true;
  std::string message;  // first violated condition when !ok
};

// Shift must stay within per-slot bounds and sum to zero over the day;
// curtailment must stay within [0, cap].
DrCheck thermal_dr_feasible(const std::array<double, kSlots>& shift,
                            const std::array<double, kSlots>& curtail,
                            const ThermalDrLimits& lim, double tol = 1e-9);

}  // namespace ries
