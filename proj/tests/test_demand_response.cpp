#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ries/demand_response.hpp"
#include "ries/rng.hpp"

using namespace ries;

// ---------------------------------------------------------------------------
// Storage recursion
// ---------------------------------------------------------------------------

TEST_CASE("storage step charges, discharges and idles by the book") {
  StorageParams p;
  p.cap_kwh = 100.0;
  p.p_ch_kw = 50.0;
  p.p_dis_kw = 50.0;
  p.eta_ch = 0.9;
  p.eta_dis = 0.9;
  CHECK(storage_step(50.0, 0.0, 0.0, p) == 50.0);
  CHECK(storage_step(50.0, 10.0, 0.0, p) == doctest::Approx(59.0).epsilon(1e-14));
  CHECK(storage_step(50.0, 0.0, 9.0, p) == doctest::Approx(40.0).epsilon(1e-14));
}

TEST_CASE("storage step rejects charge beyond the tank") {
  StorageParams p;
  p.cap_kwh = 100.0;
  p.eta_ch = 0.9;
  p.eta_dis = 0.9;
  CHECK_THROWS_AS(storage_step(95.0, 10.0, 0.0, p), DataError);
  CHECK_THROWS_AS(storage_step(5.0, 0.0, 10.0, p), DataError);
  CHECK_THROWS_AS(storage_step(50.0, -1.0, 0.0, p), DataError);
}

TEST_CASE("round-trip losses make charge-then-discharge a strict loss") {
  StorageParams p;
  p.cap_kwh = 200.0;
  p.eta_ch = 0.88;
  p.eta_dis = 0.88;
  double q = storage_step(100.0, 20.0, 0.0, p);
  // draw back exactly what charging banked
  double banked = q - 100.0;
  double q2 = storage_step(q, 0.0, banked * p.eta_dis, p);
  CHECK(q2 == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(banked * p.eta_dis < 20.0);  // less power out than went in
}

// ---------------------------------------------------------------------------
// Price-based response
// ---------------------------------------------------------------------------

TEST_CASE("elasticity matrix separates tariff period classes") {
  TouPriceSchedule tou;
  ElasticityParams ep;  // self -0.2, cross 0.03
  Eigen::MatrixXd e = build_elasticity_matrix(tou, ep);
  REQUIRE(e.rows() == kSlots);
  REQUIRE(e.cols() == kSlots);
  CHECK(e(12, 12) == ep.self);
  CHECK(e(3, 4) == 0.0);     // valley-valley
  CHECK(e(3, 12) == ep.cross);  // valley-peak
  CHECK(e(8, 12) == ep.cross);  // flat-peak
  for (int t = 0; t < kSlots; ++t) {
    CHECK(e(t, t) <= 0.0);
    for (int s = 0; s < kSlots; ++s)
      if (t != s) CHECK(e(t, s) >= 0.0);
  }
}

TEST_CASE("no price change means no load change") {
  TouPriceSchedule tou;
  Eigen::MatrixXd e = build_elasticity_matrix(tou, {});
  std::array<double, kSlots> base{}, price = tou.prices();
  base.fill(500.0);
  auto d = pbdr_adjustment(base, price, price, e, 0.35);
  for (int t = 0; t < kSlots; ++t) CHECK(d[t] == 0.0);
}

TEST_CASE("own-price elasticity moves the slot by elasticity times relative change") {
  TouPriceSchedule tou;
  ElasticityParams ep;
  ep.self = -0.2;
  ep.cross = 0.0;
  Eigen::MatrixXd e = build_elasticity_matrix(tou, ep);
  std::array<double, kSlots> base{}, ref = tou.prices(), price = ref;
  base.fill(1000.0);
  price[12] *= 1.10;  // +10% in one slot
  auto d = pbdr_adjustment(base, price, ref, e, 1.0);
  CHECK(d[12] == doctest::Approx(-0.02 * 1000.0).epsilon(1e-12));
  for (int t = 0; t < kSlots; ++t)
    if (t != 12) CHECK(d[t] == 0.0);
  // only the eligible share participates
  auto half = pbdr_adjustment(base, price, ref, e, 0.5);
  CHECK(half[12] == doctest::Approx(0.5 * d[12]).epsilon(1e-12));
}

TEST_CASE("a column-balanced matrix conserves daily energy") {
  // columns weighted by the (uniform) base load sum to zero, so the total
  // adjustment vanishes for any tariff
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(kSlots, kSlots);
  for (int s = 0; s < kSlots; ++s) {
    e(s, s) = -0.2;
    e((s + 1) % kSlots, s) = 0.2;
  }
  std::array<double, kSlots> base{}, ref{}, price{};
  base.fill(100.0);
  ref.fill(0.5);
  Rng rng(61);
  for (int t = 0; t < kSlots; ++t) price[t] = rng.uniform(0.2, 1.2);
  auto d = pbdr_adjustment(base, price, ref, e, 0.35);
  double total = 0.0;
  for (int t = 0; t < kSlots; ++t) total += d[t];
  CHECK(std::fabs(total) <= 1e-9);
}

TEST_CASE("non-positive reference prices are rejected") {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(kSlots, kSlots);
  std::array<double, kSlots> base{}, ref{}, price{};
  base.fill(100.0);
  price.fill(0.5);
  ref.fill(0.5);
  ref[7] = 0.0;
  CHECK_THROWS_AS(pbdr_adjustment(base, price, ref, e, 1.0), DataError);
}

// ---------------------------------------------------------------------------
// Incentive-based response
// ---------------------------------------------------------------------------

TEST_CASE("incentive tiers fill cheapest-first") {
  IbdrOffer offer;
  offer.down = {{0.5, 10.0}, {0.8, 10.0}};
  IbdrResult r = ibdr_response(offer, 15.0);
  CHECK(r.delivered_kwh == doctest::Approx(15.0).epsilon(1e-14));
  CHECK(r.compensation_yuan == doctest::Approx(10.0 * 0.5 + 5.0 * 0.8).epsilon(1e-14));

  // order in the offer must not matter
  IbdrOffer shuffled;
  shuffled.down = {{0.8, 10.0}, {0.5, 10.0}};
  IbdrResult s = ibdr_response(shuffled, 15.0);
  CHECK(s.compensation_yuan == doctest::Approx(r.compensation_yuan).epsilon(1e-14));
}

TEST_CASE("requests truncate at the offered capability") {
  IbdrOffer offer;
  offer.down = {{0.5, 10.0}, {0.8, 10.0}};
  IbdrResult r = ibdr_response(offer, 100.0);
  CHECK(r.delivered_kwh == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(r.compensation_yuan == doctest::Approx(13.0).epsilon(1e-14));
  CHECK(ibdr_response(offer, 0.0).delivered_kwh == 0.0);
  CHECK(ibdr_response(IbdrOffer{}, 25.0).delivered_kwh == 0.0);
}

TEST_CASE("negative requests draw on the up tiers") {
  IbdrOffer offer;
  offer.down = {{0.5, 10.0}};
  offer.up = {{0.15, 8.0}};
  IbdrResult r = ibdr_response(offer, -5.0);
  CHECK(r.delivered_kwh == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(r.compensation_yuan == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("compensation is monotone in the requested magnitude") {
  IbdrOffer offer;
  offer.down = {{0.4, 12.0}, {0.7, 6.0}, {1.1, 9.0}};
  double prev = -1.0;
  for (int i = 0; i <= 60; ++i) {
    IbdrResult r = ibdr_response(offer, i * 0.6);
    CHECK(r.compensation_yuan >= prev - 1e-12);
    CHECK(r.delivered_kwh <= 27.0 + 1e-12);
    prev = r.compensation_yuan;
  }
}

// ---------------------------------------------------------------------------
// Thermal comfort
// ---------------------------------------------------------------------------

TEST_CASE("vote model evaluates its closed form") {
  CHECK(pmv(33.0, 33.0, 1.0, 0.9) == doctest::Approx(2.43).epsilon(1e-14));
  CHECK(pmv(33.0, 21.0, 1.0, 0.9) == doctest::Approx(2.43 - 3.76 * 12.0).epsilon(1e-14));
  // warmer room, higher vote
  CHECK(pmv(33.5, 22.0, 20.0, 0.9) > pmv(33.5, 18.0, 20.0, 0.9));
}

TEST_CASE("comfort band endpoints invert the vote limits") {
  ComfortParams cp;
  int night = 2, day = 12;
  REQUIRE(!is_daytime(night, cp));
  REQUIRE(is_daytime(day, cp));
  TempBand nb = comfort_band(night, cp);
  CHECK(pmv(cp.t_skin, nb.lo_c, cp.met, cp.i_cl) ==
        doctest::Approx(-cp.night_limit).epsilon(1e-9));
  CHECK(pmv(cp.t_skin, nb.hi_c, cp.met, cp.i_cl) ==
        doctest::Approx(cp.night_limit).epsilon(1e-9));
  TempBand db = comfort_band(day, cp);
  CHECK(pmv(cp.t_skin, db.hi_c, cp.met, cp.i_cl) ==
        doctest::Approx(cp.day_upper).epsilon(1e-9));
  CHECK(pmv(cp.t_skin, db.lo_c, cp.met, cp.i_cl) ==
        doctest::Approx(cp.day_lower).epsilon(1e-9));
  CHECK(nb.lo_c < nb.hi_c);
  CHECK(db.lo_c < db.hi_c);
  // the daytime warm-side bound is stricter than the night bound
  CHECK(db.hi_c < nb.hi_c);
}

// ---------------------------------------------------------------------------
// Building dynamics
// ---------------------------------------------------------------------------

TEST_CASE("room temperature holds at the balance point") {
  BuildingParams bp;  // k_f 0.25 kW/C, c 10 kWh/C
  double t_in = 20.0, t_out = 0.0;
  double hold = bp.k_f_kw_c * (t_in - t_out);
  CHECK(room_temperature_step(t_in, t_out, hold, bp) == doctest::Approx(t_in).epsilon(1e-14));
  CHECK(room_temperature_step(t_in, t_out, 0.0, bp) < t_in);
  CHECK(room_temperature_step(t_in, t_out, 2.0 * hold, bp) > t_in);
  // hand Euler step: flow = 6 - 5 = 1 kW over 10 kWh/C
  CHECK(room_temperature_step(20.0, 0.0, 6.0, bp) == doctest::Approx(20.1).epsilon(1e-14));
}

// ---------------------------------------------------------------------------
// Thermal DR feasibility
// ---------------------------------------------------------------------------

TEST_CASE("zero adjustment is always feasible") {
  ThermalDrLimits lim;
  lim.shift_max.fill(50.0);
  lim.curtail_max.fill(30.0);
  std::array<double, kSlots> z{};
  CHECK(thermal_dr_feasible(z, z, lim).ok);
}

TEST_CASE("unbalanced shifting names the daily-sum constraint") {
  ThermalDrLimits lim;
  lim.shift_max.fill(50.0);
  lim.curtail_max.fill(30.0);
  std::array<double, kSlots> shift{}, curtail{};
  shift[3] = 5.0;  // nothing compensates
  DrCheck c = thermal_dr_feasible(shift, curtail, lim);
  CHECK(!c.ok);
  CHECK(c.message.find("balance") != std::string::npos);
}

TEST_CASE("bound-saturating but balanced shifting passes") {
  ThermalDrLimits lim;
  lim.shift_max.fill(50.0);
  lim.curtail_max.fill(30.0);
  std::array<double, kSlots> shift{}, curtail{};
  shift[2] = 50.0;
  shift[14] = -50.0;
  curtail[5] = 30.0;
  CHECK(thermal_dr_feasible(shift, curtail, lim).ok);

  shift[2] = 50.2;
  shift[14] = -50.2;
  DrCheck c = thermal_dr_feasible(shift, curtail, lim);
  CHECK(!c.ok);
  CHECK(c.message.find("slot 2") != std::string::npos);

  shift[2] = 0.0;
  shift[14] = 0.0;
  curtail[5] = -1.0;
  CHECK(!thermal_dr_feasible(shift, curtail, lim).ok);
}
