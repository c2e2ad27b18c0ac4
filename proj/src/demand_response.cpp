#include "ries/demand_response.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace ries {

// --- TOU schedule ----------------------------------------------------------

std::array<TouPeriod, kSlots> TouPriceSchedule::default_period_map() {
  std::array<TouPeriod, kSlots> m{};
  auto set = [&m](int lo, int hi, TouPeriod p) {
    for (int t = lo; t < hi; ++t) m[static_cast<size_t>(t)] = p;
  };
  set(0, 24, TouPeriod::Flat);
  set(23, 24, TouPeriod::Valley);
  set(0, 7, TouPeriod::Valley);
  set(10, 15, TouPeriod::Peak);
  set(18, 21, TouPeriod::Peak);
  return m;
}

double TouPriceSchedule::price(int slot) const {
  switch (period[static_cast<size_t>(slot)]) {
    case TouPeriod::Valley: return valley;
    case TouPeriod::Flat: return flat;
    case TouPeriod::Peak: return peak;
  }
  return flat;
}

std::array<double, kSlots> TouPriceSchedule::prices() const {
  std::array<double, kSlots> p{};
  for (int t = 0; t < kSlots; ++t) p[static_cast<size_t>(t)] = price(t);
  return p;
}

void TouPriceSchedule::validate() const {
  if (!(valley > 0.0)) throw ConfigError("tou: valley price must be positive");
  if (!(valley <= flat))
    throw ConfigError("tou: valley price must not exceed flat price");
  if (!(flat <= peak))
    throw ConfigError("tou: flat price must not exceed peak price");
}

TouPeriod period_of(const TouPriceSchedule& s, int slot) {
  if (slot < 0 || slot >= kSlots)
    throw DataError(fmt::format("period_of: slot {} out of range", slot));
  return s.period[static_cast<size_t>(slot)];
}

// --- Storage ---------------------------------------------------------------

double storage_step(double q_kwh, double ch_kw, double dis_kw,
                    const StorageParams& p, double dt_h) {
  if (ch_kw < 0 || dis_kw < 0)
    throw DataError("storage_step: negative charge/discharge power");
  double q_next = q_kwh + (p.eta_ch * ch_kw - dis_kw / p.eta_dis) * dt_h;
  if (q_next < -1e-9 || q_next > p.cap_kwh + 1e-9)
    throw DataError(fmt::format(
        "storage_step: state of charge {:.6g} outside [0, {:.6g}]", q_next, p.cap_kwh));
  return q_next;
}

// --- Price-based response --------------------------------------------------

Eigen::MatrixXd build_elasticity_matrix(const TouPriceSchedule& ref,
                                        const ElasticityParams& ep) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(kSlots, kSlots);
  for (int t = 0; t < kSlots; ++t)
    for (int s = 0; s < kSlots; ++s) {
      if (t == s)
        e(t, s) = ep.self;
      else if (period_of(ref, t) != period_of(ref, s))
        e(t, s) = ep.cross;
    }
  return e;
}

std::array<double, kSlots> pbdr_adjustment(const std::array<double, kSlots>& base_load,
                                           const std::array<double, kSlots>& price,
                                           const std::array<double, kSlots>& ref_price,
                                           const Eigen::MatrixXd& elasticity,
                                           double eligible_share) {
  std::array<double, kSlots> d{};
  Eigen::VectorXd rel(kSlots);
  for (int s = 0; s < kSlots; ++s) {
    double ref = ref_price[static_cast<size_t>(s)];
    if (!(ref > 0.0)) throw DataError("pbdr_adjustment: reference price must be positive");
    rel(s) = (price[static_cast<size_t>(s)] - ref) / ref;
  }
  Eigen::VectorXd resp = elasticity * rel;
  for (int t = 0; t < kSlots; ++t)
    d[static_cast<size_t>(t)] = eligible_share * base_load[static_cast<size_t>(t)] * resp(t);
  return d;
}

// --- Incentive-based response ----------------------------------------------

IbdrResult ibdr_response(const IbdrOffer& offer, double requested_kwh) {
  const auto& tiers = requested_kwh >= 0 ? offer.down : offer.up;
  double want = std::abs(requested_kwh);

  std::vector<IbdrTier> sorted = tiers;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const IbdrTier& a, const IbdrTier& b) {
                     return a.price_yuan_kwh < b.price_yuan_kwh;
                   });
  IbdrResult r;
  for (const auto& tier : sorted) {
    if (want <= 0) break;
    double take = std::min(want, tier.max_kwh);
    r.delivered_kwh += take;
    r.compensation_yuan += take * tier.price_yuan_kwh;
    want -= take;
  }
  return r;
}

// --- Thermal comfort -------------------------------------------------------

double pmv(double t_skin, double t_in, double met, double i_cl) {
  return 2.43 - 3.76 * (t_skin - t_in) / (met * (i_cl + 0.1));
}

bool is_daytime(int slot, const ComfortParams& cp) {
  return slot >= cp.day_start && slot <= cp.day_end;
}

namespace {
// Smallest t with pmv(t) >= target (pmv is increasing in indoor temperature).
double invert_pmv(double target, const ComfortParams& cp) {
  double lo = -60.0, hi = 120.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (pmv(cp.t_skin, mid, cp.met, cp.i_cl) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TempBand comfort_band(int slot, const ComfortParams& cp) {
  double vote_lo, vote_hi;
  if (is_daytime(slot, cp)) {
    vote_lo = cp.day_lower;
    vote_hi = cp.day_upper;
  } else {
    vote_lo = -cp.night_limit;
    vote_hi = cp.night_limit;
  }
  TempBand b;
  b.lo_c = invert_pmv(vote_lo, cp);
  b.hi_c = invert_pmv(vote_hi, cp);
  return b;
}

// --- Building dynamics ------------------------------------------------------

double room_temperature_step(double t_in, double t_out, double heat_kw_per_room,
                             const BuildingParams& bp, double dt_h) {
  double flow = heat_kw_per_room - bp.k_f_kw_c * (t_in - t_out);
  return t_in + dt_h * flow / bp.c_kwh_c;
}

// --- Thermal DR feasibility --------------------------------------------------

DrCheck thermal_dr_feasible(const std::array<double, kSlots>& shift,
                            const std::array<double, kSlots>& curtail,
                            const ThermalDrLimits& lim, double tol) {
  DrCheck c;
  double sum = 0.0;
  for (int t = 0; t < kSlots; ++t) {
    size_t i = static_cast<size_t>(t);
    if (std::abs(shift[i]) > lim.shift_max[i] + tol) {
      c.ok = false;
      c.message = fmt::format("shift at slot {} is {:.6g}, bound {:.6g}", t,
                              shift[i], lim.shift_max[i]);
      return c;
    }
    if (curtail[i] < -tol || curtail[i] > lim.curtail_max[i] + tol) {
      c.ok = false;
      c.message = fmt::format("curtailment at slot {} is {:.6g}, cap {:.6g}", t,
                              curtail[i], lim.curtail_max[i]);
      return c;
    }
    sum += shift[i];
  }
  if (std::abs(sum) > tol * kSlots) {
    c.ok = false;
    c.message = fmt::format("shifted energy does not balance over the day (sum {:.6g})", sum);
  }
  return c;
}

}  // namespace ries
