#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ries/devices.hpp"
#include "ries/rng.hpp"

using namespace ries;

// ---------------------------------------------------------------------------
// Wind power curve
// ---------------------------------------------------------------------------

TEST_CASE("wind curve hits its defining points") {
  WindParams w;  // cut-in 3, rated 11, cut-out 20, 2000 kW
  CHECK(wind_output(0.0, w) == 0.0);
  CHECK(wind_output(w.cut_in - 0.01, w) == 0.0);
  CHECK(wind_output(w.rated_speed, w) == w.rated_kw);
  double mid = 0.5 * (w.cut_in + w.rated_speed);
  CHECK(wind_output(mid, w) == doctest::Approx(0.5 * w.rated_kw).epsilon(1e-12));
  CHECK(wind_output(15.0, w) == w.rated_kw);  // plateau
  CHECK(wind_output(w.cut_out, w) == 0.0);
  CHECK(wind_output(w.cut_out + 40.0, w) == 0.0);
}

TEST_CASE("wind curve is monotone below cut-out and dead above") {
  WindParams w;
  double prev = -1.0;
  for (int i = 0; i <= 2000; ++i) {
    double v = w.cut_out * i / 2000.0 * 0.999999;
    double out = wind_output(v, w);
    CHECK(out >= prev - 1e-12);
    CHECK(out >= 0.0);
    prev = out;
  }
  for (double v = w.cut_out; v < w.cut_out + 30.0; v += 0.7)
    CHECK(wind_output(v, w) == 0.0);
}

TEST_CASE("wind curve is continuous at cut-in and rated speed") {
  WindParams w;
  CHECK(wind_output(w.cut_in, w) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(wind_output(w.cut_in + 1e-9, w) < 1e-5);
  CHECK(wind_output(w.rated_speed - 1e-9, w) ==
        doctest::Approx(w.rated_kw).epsilon(1e-9));
}

// ---------------------------------------------------------------------------
// PV model
// ---------------------------------------------------------------------------

TEST_CASE("pv output at nominal conditions is the rating") {
  PvParams p;
  CHECK(pv_output(p.g_nominal, p.t_ref, p) == doctest::Approx(p.rated_kw));
  CHECK(pv_output(0.0, 55.0, p) == 0.0);
}

TEST_CASE("pv hot-cell derating follows the linear coefficient") {
  PvParams p;
  p.temp_coeff = -0.004;
  double out = pv_output(p.g_nominal, p.t_ref + 10.0, p);
  CHECK(out == doctest::Approx(0.96 * p.rated_kw).epsilon(1e-12));
  // absurdly hot cells clamp at zero instead of going negative
  CHECK(pv_output(p.g_nominal, p.t_ref + 400.0, p) == 0.0);
}

TEST_CASE("pv output scales linearly with irradiance") {
  PvParams p;
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    double g = rng.uniform(10.0, 900.0);
    double t = rng.uniform(-5.0, 45.0);
    double one = pv_output(g, t, p);
    double two = pv_output(2.0 * g, t, p);
    CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-12));
    CHECK(one >= 0.0);
  }
}

// ---------------------------------------------------------------------------
// Cogeneration units
// ---------------------------------------------------------------------------

TEST_CASE("chp splits fuel per the datasheet efficiencies") {
  ChpParams p;  // 30% electric, 50% thermal
  ChpOutput o = chp_output(100.0, p);
  CHECK(o.electric_kw == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(o.heat_kw == doctest::Approx(50.0).epsilon(1e-12));
  o = chp_output(0.0, p);
  CHECK(o.electric_kw == 0.0);
  CHECK(o.heat_kw == 0.0);
}

TEST_CASE("chp electric side saturates at nameplate") {
  ChpParams p;
  double fuel = 1.5 * p.cap_e_kw / p.eta_e;
  ChpOutput o = chp_output(fuel, p);
  CHECK(o.electric_kw == p.cap_e_kw);
}

TEST_CASE("gas turbine converts fuel at 29/42 percent") {
  GtParams p;
  ChpOutput o = gt_output(100.0, p);
  CHECK(o.electric_kw == doctest::Approx(29.0).epsilon(1e-12));
  CHECK(o.heat_kw == doctest::Approx(42.0).epsilon(1e-12));
  CHECK(gt_output(0.0, p).electric_kw == 0.0);
}

TEST_CASE("conversion is positively homogeneous below the caps") {
  GtParams p;
  Rng rng(17);
  for (int i = 0; i < 40; ++i) {
    double fuel = rng.uniform(1.0, 0.4 * p.cap_e_kw / p.eta_e);
    ChpOutput one = gt_output(fuel, p);
    ChpOutput two = gt_output(2.0 * fuel, p);
    CHECK(two.electric_kw == doctest::Approx(2.0 * one.electric_kw).epsilon(1e-12));
    CHECK(two.heat_kw == doctest::Approx(2.0 * one.heat_kw).epsilon(1e-12));
  }
}

// ---------------------------------------------------------------------------
// Gas boiler fuel curve
// ---------------------------------------------------------------------------

TEST_CASE("boiler fuel slope derives from efficiency when unset") {
  GbParams p;  // eta 0.88, sentinel fuel_b
  CHECK(gb_fuel_slope(p, 10.0) == doctest::Approx(1.0 / 8.8).epsilon(1e-15));
  GbFuel f = gb_fuel_and_emissions(88.0, p, 10.0, 2.0);
  CHECK(f.gas_nm3 == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(f.co2_kg == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("boiler idles for free when the intercept is zero") {
  GbParams p;
  p.fuel_c = 0.0;
  GbFuel f = gb_fuel_and_emissions(0.0, p, 10.0, 2.0);
  CHECK(f.gas_nm3 == 0.0);
  CHECK(f.co2_kg == 0.0);
}

TEST_CASE("explicit quadratic coefficients win over the sentinel") {
  GbParams p;
  p.fuel_a = 1e-5;
  p.fuel_b = 0.1;
  p.fuel_c = 0.5;
  GbFuel f = gb_fuel_and_emissions(200.0, p, 10.0, 2.2);
  double want = 1e-5 * 200.0 * 200.0 + 0.1 * 200.0 + 0.5;
  CHECK(f.gas_nm3 == doctest::Approx(want).epsilon(1e-14));
  CHECK(f.co2_kg == doctest::Approx(2.2 * want).epsilon(1e-14));
}

TEST_CASE("boiler fuel curve is convex on a fine grid") {
  GbParams p;
  p.fuel_a = 3e-5;
  p.fuel_b = 0.09;
  p.fuel_c = 1.0;
  auto fuel = [&](double q) { return gb_fuel_and_emissions(q, p, 10.0, 2.0).gas_nm3; };
  for (int i = 0; i + 2 < 100; ++i) {
    double x = p.cap_h_kw * i / 99.0;
    double y = p.cap_h_kw * (i + 2) / 99.0;
    CHECK(fuel(0.5 * (x + y)) <= 0.5 * (fuel(x) + fuel(y)) + 1e-9);
  }
}

// ---------------------------------------------------------------------------
// Electric boiler
// ---------------------------------------------------------------------------

TEST_CASE("electric boiler converts at 95 percent and caps at 400") {
  EbParams p;
  CHECK(eb_output(100.0, p) == doctest::Approx(95.0).epsilon(1e-12));
  CHECK(eb_output(0.0, p) == 0.0);
  CHECK(eb_output(10000.0, p) == p.cap_h_kw);
}

TEST_CASE("no device returns negative energy") {
  WindParams w;
  PvParams pv;
  GtParams gt;
  GbParams gb;
  EbParams eb;
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    CHECK(wind_output(rng.uniform(0.0, 30.0), w) >= 0.0);
    CHECK(pv_output(rng.uniform(0.0, 1200.0), rng.uniform(-20.0, 80.0), pv) >= 0.0);
    double fuel = rng.uniform(0.0, 5000.0);
    CHECK(gt_output(fuel, gt).electric_kw >= 0.0);
    CHECK(gt_output(fuel, gt).heat_kw >= 0.0);
    CHECK(gb_fuel_and_emissions(rng.uniform(0.0, gb.cap_h_kw), gb, 10.0, 2.0).gas_nm3 >= 0.0);
    CHECK(eb_output(rng.uniform(0.0, 900.0), eb) >= 0.0);
  }
}
