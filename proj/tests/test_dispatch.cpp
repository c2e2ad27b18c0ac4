#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "ries/config.hpp"
#include "ries/devices.hpp"
#include "ries/dispatch.hpp"
#include "ries/rng.hpp"

using namespace ries;

namespace {

std::string default_config_path() {
  return std::string(RIES_ROOT) + "/data/default/config.ini";
}

// ---------------------------------------------------------------------------
// Toy instances: GT + GB + EB + grid purchase, no storage/renewables/DR/CHP.
// Slots decouple (ramps made huge), so the exact optimum is found by vertex
// enumeration: two balance equalities over four variables means every vertex
// has two variables at a bound and the rest solved from a 2x2 system.
// ---------------------------------------------------------------------------

struct Toy {
  HorizonData h;
  ScenarioFlags flags;  // scenario 1: flat carbon price on raw emissions
};

Toy make_toy(Rng& rng, int T) {
  SystemConfig c;  // defaults, then strip everything but GT/GB/EB/grid
  c.gas_price = rng.uniform(2.0, 4.0);
  c.gas_lhv_kwh = 10.0;
  c.chp = {0.30, 0.50, 0.0, 0.0, 1e9, 0.025};
  c.gt.eta_e = rng.uniform(0.25, 0.35);
  c.gt.eta_h = rng.uniform(0.35, 0.50);
  c.gt.cap_e_kw = rng.uniform(500.0, 2000.0);
  c.gt.ramp_kw = 1e9;
  c.gt.om_yuan_kwh = rng.uniform(0.02, 0.10);
  c.gb.eta_h = rng.uniform(0.80, 0.92);
  c.gb.cap_h_kw = rng.uniform(300.0, 1500.0);
  c.gb.ramp_kw = 1e9;
  c.gb.fuel_a = 0.0;
  c.gb.fuel_b = -1.0;
  c.gb.fuel_c = 0.0;
  c.gb.om_yuan_kwh = rng.uniform(0.005, 0.05);
  c.eb.eta = rng.uniform(0.90, 0.99);
  c.eb.cap_h_kw = rng.uniform(100.0, 500.0);
  c.eb.om_yuan_kwh = rng.uniform(0.005, 0.03);
  c.storage_e = {0, 0, 0, 0.9, 0.9, 0, 0};
  c.storage_h = {0, 0, 0, 0.9, 0.9, 0, 0};
  c.carbon.base_price = 0.3;
  c.carbon.grid_ef_kg_kwh = rng.uniform(0.1, 1.0);
  c.carbon.gas_ef_kg_nm3 = 2.0;
  c.carbon.baseline = CarbonBaseline::Flat;
  c.dispatch.heat_loss = (rng.u01() < 0.5) ? 0.0 : 0.05;
  c.building.n_rooms = 0;

  const double loss = 1.0 - c.dispatch.heat_loss;
  const double heat_cap =
      loss * (c.gt.cap_e_kw * c.gt.eta_h / c.gt.eta_e + c.gb.cap_h_kw + c.eb.cap_h_kw);

  Toy toy;
  toy.flags = scenario_flags(1);
  HorizonData& h = toy.h;
  h.T = T;
  h.dt = 1.0;
  h.cfg = c;
  auto zeros = [T] { return std::vector<double>(T, 0.0); };
  h.load_e = zeros();
  h.load_h_fix = zeros();
  h.heating_base = zeros();
  h.price_e = zeros();
  h.wind_cap = h.pv_cap = h.wind_fore = h.pv_fore = zeros();
  h.pg_avail = h.biogas_raw = h.t_out = h.pbdr_delta = zeros();
  for (int t = 0; t < T; ++t) {
    h.load_e[t] = std::floor(rng.uniform(200.0, 3000.0));
    h.load_h_fix[t] = std::floor(rng.uniform(0.0, 0.7 * heat_cap));
    h.price_e[t] = rng.uniform(0.2, 1.2);
  }
  return toy;
}

// Exact optimum by vertex enumeration, fully independent of the LP machinery.
double toy_oracle(const Toy& toy) {
  const SystemConfig& c = toy.h.cfg;
  const double loss = 1.0 - c.dispatch.heat_loss;
  const double whb = c.gt.eta_h / c.gt.eta_e;
  const double gt_gas = 1.0 / (c.gt.eta_e * c.gas_lhv_kwh);   // Nm3 per kWh e
  const double gb_gas = 1.0 / (c.gb.eta_h * c.gas_lhv_kwh);   // Nm3 per kWh h
  const double eb_in_cap = c.eb.cap_h_kw / c.eb.eta;
  const double beta = c.carbon.base_price;
  const double kgas = c.carbon.gas_ef_kg_nm3;
  const double f = c.carbon.grid_ef_kg_kwh;

  double total = 0.0;
  for (int t = 0; t < toy.h.T; ++t) {
    const double le = toy.h.load_e[t], lh = toy.h.load_h_fix[t];
    const double price = toy.h.price_e[t];
    // variable order: gt, gb, eb_in, buy
    const double lo[4] = {0, 0, 0, 0};
    const double hi[4] = {c.gt.cap_e_kw, c.gb.cap_h_kw, eb_in_cap, 0};
    const double a1[4] = {1, 0, -1, 1};                        // electric row
    const double a2[4] = {loss * whb, loss, loss * c.eb.eta, 0};  // thermal row
    auto cost_of = [&](const double x[4]) {
      double gas = x[0] * gt_gas + x[1] * gb_gas;
      return c.gt.om_yuan_kwh * x[0] + c.gb.om_yuan_kwh * x[1] +
             c.eb.om_yuan_kwh * c.eb.eta * x[2] + price * x[3] +
             c.gas_price * gas + beta * (f * x[3] + kgas * gas);
    };
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        for (int bi = 0; bi < 2; ++bi)
          for (int bj = 0; bj < 2; ++bj) {
            if (bi == 1 && std::isinf(hi[i])) continue;
            if (bj == 1 && std::isinf(hi[j])) continue;
            if ((i == 3 && bi == 1) || (j == 3 && bj == 1)) continue;
            double x[4] = {0, 0, 0, 0};
            x[i] = bi ? hi[i] : lo[i];
            x[j] = bj ? hi[j] : lo[j];
            int u = -1, v = -1;
            for (int k = 0; k < 4; ++k)
              if (k != i && k != j) (u < 0 ? u : v) = k;
            double r1 = le - a1[i] * x[i] - a1[j] * x[j];
            double r2 = lh - a2[i] * x[i] - a2[j] * x[j];
            double det = a1[u] * a2[v] - a1[v] * a2[u];
            if (std::fabs(det) < 1e-12) continue;
            x[u] = (r1 * a2[v] - r2 * a1[v]) / det;
            x[v] = (a1[u] * r2 - a2[u] * r1) / det;
            bool ok = true;
            for (int k = 0; k < 4; ++k) {
              if (x[k] < lo[k] - 1e-7) ok = false;
              if (k != 3 && x[k] > hi[k] + 1e-7) ok = false;
            }
            if (ok) best = std::min(best, cost_of(x));
          }
    if (std::isinf(best)) return best;
    total += best;
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Standard-normal quantile
// ---------------------------------------------------------------------------

TEST_CASE("inverse normal cdf hits reference quantiles") {
  CHECK(inverse_normal_cdf(0.5) == 0.0);
  CHECK(std::fabs(inverse_normal_cdf(0.975) - 1.959963984540054) < 1e-9);
  CHECK(std::fabs(inverse_normal_cdf(0.841344746068543) - 1.0) < 1e-9);
  CHECK(std::fabs(inverse_normal_cdf(0.022750131948179) + 2.0) < 1e-9);
  CHECK(std::fabs(inverse_normal_cdf(0.998650101968370) - 3.0) < 1e-9);
  CHECK(std::fabs(inverse_normal_cdf(1e-10) + 6.361340902404056) < 1e-6);
}

TEST_CASE("inverse normal cdf is antisymmetric and monotone") {
  double prev = -lp::kInf;
  for (int i = 1; i < 1000; ++i) {
    double p = i / 1000.0;
    double x = inverse_normal_cdf(p);
    CHECK(std::fabs(x + inverse_normal_cdf(1.0 - p)) <= 1e-12);
    CHECK(x > prev);
    prev = x;
  }
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), DataError);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), DataError);
  CHECK_THROWS_AS(inverse_normal_cdf(-0.2), DataError);
}

// ---------------------------------------------------------------------------
// Horizon assembly
// ---------------------------------------------------------------------------

TEST_CASE("confidence one-half leaves renewable caps at the forecast") {
  SystemConfig cfg = load_config(default_config_path());
  cfg.dispatch.confidence = 0.5;
  derive(cfg);
  HorizonData h = make_horizon(cfg, scenario_flags(1));
  for (int t = 0; t < kSlots; ++t) {
    CHECK(h.wind_cap[t] == h.wind_fore[t]);
    CHECK(h.pv_cap[t] == h.pv_fore[t]);
  }
}

TEST_CASE("tighter confidence shaves the caps") {
  SystemConfig cfg = load_config(default_config_path());
  HorizonData h = make_horizon(cfg, scenario_flags(1));  // confidence 0.90
  for (int t = 0; t < kSlots; ++t) {
    CHECK(h.wind_cap[t] <= h.wind_fore[t] + 1e-12);
    if (h.wind_fore[t] > 0) CHECK(h.wind_cap[t] < h.wind_fore[t]);
  }
}

TEST_CASE("disabling demand response removes every DR column") {
  SystemConfig cfg = load_config(default_config_path());
  for (int s : {1, 3}) {
    HorizonData h = make_horizon(cfg, scenario_flags(s));
    BuiltLp b = build_lp(h, scenario_flags(s));
    CHECK(b.layout.n_dr_cols == 0);
    for (int t = 0; t < kSlots; ++t) CHECK(h.pbdr_delta[t] == 0.0);
  }
  BuiltLp with = build_lp(make_horizon(cfg, scenario_flags(4)), scenario_flags(4));
  CHECK(with.layout.n_dr_cols > 0);
}

TEST_CASE("structural counts are deterministic") {
  SystemConfig cfg = load_config(default_config_path());
  BuiltLp a = build_lp(make_horizon(cfg, scenario_flags(4)), scenario_flags(4));
  BuiltLp b = build_lp(make_horizon(cfg, scenario_flags(4)), scenario_flags(4));
  CHECK(a.model.num_cols() == b.model.num_cols());
  CHECK(a.model.num_rows() == b.model.num_rows());
  CHECK(a.model.num_cols() > 24 * 10);
  CHECK((int)a.row_slot_tag.size() == a.model.num_rows());
}

// ---------------------------------------------------------------------------
// Toy-instance oracle
// ---------------------------------------------------------------------------

TEST_CASE("dispatch matches the vertex-enumeration oracle on random toys") {
  Rng rng(20250814);
  int solved = 0;
  for (int k = 0; k < 40; ++k) {
    Toy toy = make_toy(rng, 1 + k % 3);
    double want = toy_oracle(toy);
    DispatchSolution sol = solve_dispatch(toy.h, toy.flags);
    REQUIRE(sol.status == lp::Status::Optimal);
    double got = sol.cost.total();
    CHECK(std::fabs(got - want) <= 1e-6 * std::max(1.0, std::fabs(want)));
    VerifyReport vr = verify_solution(toy.h, toy.flags, sol);
    INFO(vr.first_failure());
    CHECK(vr.ok());
    ++solved;
  }
  CHECK(solved == 40);
}

TEST_CASE("zero load gives an all-zero dispatch at zero cost") {
  Rng rng(7);
  Toy toy = make_toy(rng, 3);
  for (int t = 0; t < toy.h.T; ++t) {
    toy.h.load_e[t] = 0.0;
    toy.h.load_h_fix[t] = 0.0;
  }
  DispatchSolution sol = solve_dispatch(toy.h, toy.flags);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.cost.total() == doctest::Approx(0.0).epsilon(1e-12));
  for (int t = 0; t < toy.h.T; ++t) {
    CHECK(sol.gt_e[t] == 0.0);
    CHECK(sol.gb_h[t] == 0.0);
    CHECK(sol.eb_in[t] == 0.0);
    CHECK(sol.buy_e[t] == 0.0);
    CHECK(sol.buy_gas[t] == 0.0);
  }
  CHECK(sol.ledger.e_total_kg == 0.0);
}

TEST_CASE("impossible thermal demand is diagnosed, not mis-solved") {
  Rng rng(11);
  Toy toy = make_toy(rng, 2);
  toy.h.load_h_fix[1] = 1e7;
  DispatchSolution sol = solve_dispatch(toy.h, toy.flags);
  CHECK(sol.status != lp::Status::Optimal);
  CHECK(sol.infeasible_reason.find("thermal demand") != std::string::npos);
  CHECK(sol.infeasible_reason.find("slot 1") != std::string::npos);
}

// ---------------------------------------------------------------------------
// The audit rejects corrupted trajectories
// ---------------------------------------------------------------------------

TEST_CASE("verify_solution flags hand-corrupted solutions") {
  SystemConfig cfg = load_config(default_config_path());
  ScenarioFlags fl = scenario_flags(4);
  HorizonData h = make_horizon(cfg, fl);
  DispatchSolution good = solve_dispatch(h, fl);
  REQUIRE(good.status == lp::Status::Optimal);
  REQUIRE(verify_solution(h, fl, good).ok());

  SUBCASE("electric balance") {
    DispatchSolution bad = good;
    bad.wind[5] += 1.0;
    VerifyReport vr = verify_solution(h, fl, bad);
    CHECK(!vr.ok());
    CHECK(vr.first_failure().find("electric") != std::string::npos);
  }
  SUBCASE("storage recursion") {
    DispatchSolution bad = good;
    bad.es_soc[3] += 5.0;
    CHECK(!verify_solution(h, fl, bad).ok());
  }
  SUBCASE("variable bounds") {
    DispatchSolution bad = good;
    bad.gb_h[2] = cfg.gb.cap_h_kw + 10.0;
    CHECK(!verify_solution(h, fl, bad).ok());
  }
  SUBCASE("indoor comfort trajectory") {
    DispatchSolution bad = good;
    bad.t_in[8] += 3.0;
    CHECK(!verify_solution(h, fl, bad).ok());
  }
  SUBCASE("carbon ledger") {
    DispatchSolution bad = good;
    bad.cost.cet += 1.0;
    CHECK(!verify_solution(h, fl, bad).ok());
  }
  SUBCASE("ramp limits") {
    DispatchSolution bad = good;
    // teleport the turbine between two adjacent slots, keeping each slot's
    // own balances inconsistent only through the ramp row
    bad.gt_e[12] = cfg.gt.cap_e_kw;
    bad.gt_e[13] = 0.0;
    VerifyReport vr = verify_solution(h, fl, bad);
    CHECK(!vr.ok());
  }
}

// ---------------------------------------------------------------------------
// Bundled-config scenario behavior used throughout the acceptance suite
// ---------------------------------------------------------------------------

TEST_CASE("all four scenarios solve and pass the audit on the bundled data") {
  SystemConfig cfg = load_config(default_config_path());
  for (int s = 1; s <= 4; ++s) {
    ScenarioFlags fl = scenario_flags(s);
    HorizonData h = make_horizon(cfg, fl);
    DispatchSolution sol = solve_dispatch(h, fl);
    REQUIRE(sol.status == lp::Status::Optimal);
    VerifyReport vr = verify_solution(h, fl, sol);
    INFO("scenario ", s, ": ", vr.first_failure());
    CHECK(vr.ok());
    CHECK(vr.max_balance_residual() <= 1e-6);
    CHECK(sol.lp_residual <= 1e-6);
  }
}

TEST_CASE("relaxation dominance: DR never hurts, trading never hurts emissions") {
  SystemConfig cfg = load_config(default_config_path());
  std::array<DispatchSolution, 5> sol;
  for (int s = 1; s <= 4; ++s)
    sol[s] = solve_dispatch(cfg, scenario_flags(s));
  // DR adds feasible choices at equal pricing: objective can only improve
  CHECK(sol[2].lp_objective <= sol[1].lp_objective + 1e-6);
  CHECK(sol[4].lp_objective <= sol[3].lp_objective + 1e-6);
  // carbon trading prices emissions harder: optimal emissions never rise
  CHECK(sol[3].ledger.e_total_kg <= sol[1].ledger.e_total_kg + 1e-6);
  CHECK(sol[4].ledger.e_total_kg <= sol[2].ledger.e_total_kg + 1e-6);
  CHECK(sol[4].ledger.e_total_kg <= sol[3].ledger.e_total_kg + 1e-6);
}

TEST_CASE("cost decomposition identity") {
  SystemConfig cfg = load_config(default_config_path());
  for (int s : {1, 4}) {
    DispatchSolution sol = solve_dispatch(cfg, scenario_flags(s));
    REQUIRE(sol.status == lp::Status::Optimal);
    double sum = sol.cost.c_buy() + sol.cost.c_om() + sol.cost.cet;
    CHECK(std::fabs(sum - sol.cost.total()) <= 1e-9 * std::max(1.0, std::fabs(sum)));
  }
}
