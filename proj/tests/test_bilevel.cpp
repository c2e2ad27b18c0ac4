#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "ries/bilevel.hpp"
#include "ries/dispatch.hpp"
#include "ries/rng.hpp"

using namespace ries;

namespace {

std::string default_config_path() {
  return std::string(RIES_ROOT) + "/data/default/config.ini";
}

// An empty park: the grid serves only its own urban load.
DispatchSolution idle_park() {
  DispatchSolution park;
  park.status = lp::Status::Optimal;
  park.T = kSlots;
  park.dt = 1.0;
  park.buy_e.assign(kSlots, 0.0);
  return park;
}

GridParams one_coal_unit() {
  GridParams g;
  g.coal.push_back({0.001, 0.1, 5.0, 1000.0, 0.95});
  g.curtail_penalty = 0.05;
  g.carbon_price = 0.3;
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tariff encoding
// ---------------------------------------------------------------------------

TEST_CASE("a single segment decodes to a flat tariff") {
  PriceChromosome c;
  c.seg = {{0, 0.5}};
  c.validate(0.2, 1.2);
  auto p = decode_chromosome(c);
  for (int t = 0; t < kSlots; ++t) CHECK(p[t] == 0.5);
}

TEST_CASE("the bundled three-tier tariff survives an encode/decode cycle") {
  TouPriceSchedule tou;
  PriceChromosome c = tou_chromosome(tou);
  c.validate(0.2, 1.2);
  CHECK(c.seg.size() == 7);  // valley/flat/peak/flat/peak/flat/valley
  auto got = decode_chromosome(c);
  auto want = tou.prices();
  for (int t = 0; t < kSlots; ++t) CHECK(got[t] == want[t]);
}

TEST_CASE("decoded changepoints are exactly the gene boundaries") {
  Rng rng(101);
  for (int rep = 0; rep < 30; ++rep) {
    int nseg = 2 + static_cast<int>(rng.below(10));
    std::set<int> starts{0};
    while (static_cast<int>(starts.size()) < nseg)
      starts.insert(1 + static_cast<int>(rng.below(kSlots - 1)));
    PriceChromosome c;
    int i = 0;
    for (int s : starts)  // prices spaced apart so every boundary is visible
      c.seg.push_back({s, 0.25 + 0.07 * i++ + rng.uniform(0.0, 0.04)});
    c.validate(0.2, 1.2);
    auto p = decode_chromosome(c);
    std::set<int> change{0};
    for (int t = 1; t < kSlots; ++t)
      if (p[t] != p[t - 1]) change.insert(t);
    CHECK(change == starts);
  }
}

TEST_CASE("malformed chromosomes are rejected") {
  PriceChromosome c;
  CHECK_THROWS_AS(c.validate(0.2, 1.2), ConfigError);  // empty
  c.seg = {{1, 0.5}};
  CHECK_THROWS_AS(c.validate(0.2, 1.2), ConfigError);  // must start at 0
  c.seg = {{0, 0.5}, {5, 0.6}, {5, 0.7}};
  CHECK_THROWS_AS(c.validate(0.2, 1.2), ConfigError);  // non-increasing
  c.seg = {{0, 0.5}, {5, 1.5}};
  CHECK_THROWS_AS(c.validate(0.2, 1.2), ConfigError);  // price above cap
  c.seg = {{0, 0.5}, {24, 0.6}};
  CHECK_THROWS_AS(c.validate(0.2, 1.2), ConfigError);  // boundary past the day
  c.seg.clear();
  for (int s = 0; s < 13; ++s) c.seg.push_back({s, 0.5});
  CHECK_THROWS_AS(c.validate(0.2, 1.2), ConfigError);  // too many segments
}

// ---------------------------------------------------------------------------
// Grid-side cost
// ---------------------------------------------------------------------------

TEST_CASE("one coal unit serving one hot slot prices the quadratic") {
  SystemConfig cfg = load_config(default_config_path());
  for (int t = 0; t < kSlots; ++t) {
    cfg.profiles.urban_load[t] = 0.0;
    cfg.profiles.grid_pv[t] = 0.0;
  }
  cfg.profiles.urban_load[0] = 100.0;
  GridParams g = one_coal_unit();
  std::array<double, kSlots> price{};
  price.fill(0.6);

  GridCost c = grid_cost(price, idle_park(), cfg, g);
  CHECK(c.coal == doctest::Approx(0.001 * 100.0 * 100.0 + 0.1 * 100.0 + 5.0).epsilon(1e-9));
  CHECK(c.gas == 0.0);
  CHECK(c.sell == 0.0);  // the park bought nothing
  CHECK(c.curtail == 0.0);
  CHECK(c.emissions_kg == doctest::Approx(95.0).epsilon(1e-9));
  CHECK(c.market == doctest::Approx(0.3 * 95.0).epsilon(1e-9));
  CHECK(c.coal_kw[0] == doctest::Approx(100.0).epsilon(1e-9));
  for (int t = 1; t < kSlots; ++t) CHECK(c.coal_kw[t] == 0.0);
  CHECK(c.total() == doctest::Approx(c.coal + c.gas + c.curtail + c.market - c.sell));
}

TEST_CASE("idle fleet hours cost nothing") {
  SystemConfig cfg = load_config(default_config_path());
  for (int t = 0; t < kSlots; ++t) {
    cfg.profiles.urban_load[t] = 0.0;
    cfg.profiles.grid_pv[t] = 0.0;
  }
  GridCost c = grid_cost(TouPriceSchedule{}.prices(), idle_park(), cfg, one_coal_unit());
  CHECK(c.total() == 0.0);  // no committed-hour charge without output
}

TEST_CASE("merit order splits load at the equal-marginal point") {
  SystemConfig cfg = load_config(default_config_path());
  for (int t = 0; t < kSlots; ++t) {
    cfg.profiles.urban_load[t] = 0.0;
    cfg.profiles.grid_pv[t] = 0.0;
  }
  cfg.profiles.urban_load[5] = 300.0;
  GridParams g = one_coal_unit();
  g.gas.push_back({0.52, 1000.0, 0.42});
  std::array<double, kSlots> price{};
  price.fill(0.6);
  GridCost c = grid_cost(price, idle_park(), cfg, g);
  // coal marginal 0.1 + 0.002 p equals the 0.52 gas price at p = 210
  CHECK(c.coal_kw[5] == doctest::Approx(210.0).epsilon(1e-6));
  CHECK(c.gas_kw[5] == doctest::Approx(90.0).epsilon(1e-6));
  CHECK(c.coal == doctest::Approx(0.001 * 210 * 210 + 0.1 * 210 + 5).epsilon(1e-6));
  CHECK(c.gas == doctest::Approx(0.52 * 90.0).epsilon(1e-6));
}

TEST_CASE("free pv serves first and spill is penalized") {
  SystemConfig cfg = load_config(default_config_path());
  for (int t = 0; t < kSlots; ++t) {
    cfg.profiles.urban_load[t] = 0.0;
    cfg.profiles.grid_pv[t] = 0.0;
  }
  cfg.profiles.urban_load[12] = 80.0;
  cfg.profiles.grid_pv[12] = 100.0;
  GridParams g = one_coal_unit();
  GridCost c = grid_cost(TouPriceSchedule{}.prices(), idle_park(), cfg, g);
  CHECK(c.pv_kw[12] == doctest::Approx(80.0));
  CHECK(c.coal_kw[12] == 0.0);
  CHECK(c.coal == 0.0);
  CHECK(c.curtail == doctest::Approx(g.curtail_penalty * 20.0).epsilon(1e-12));
}

TEST_CASE("park purchases add demand and sales revenue") {
  SystemConfig cfg = load_config(default_config_path());
  for (int t = 0; t < kSlots; ++t) {
    cfg.profiles.urban_load[t] = 0.0;
    cfg.profiles.grid_pv[t] = 0.0;
  }
  DispatchSolution park = idle_park();
  park.buy_e[3] = 50.0;
  std::array<double, kSlots> price{};
  price.fill(0.6);
  GridCost c = grid_cost(price, park, cfg, one_coal_unit());
  CHECK(c.demand_kw[3] == doctest::Approx(50.0));
  CHECK(c.sell == doctest::Approx(0.6 * 50.0).epsilon(1e-12));
  CHECK(c.coal_kw[3] == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("demand past the whole fleet is an error, not a silent clip") {
  SystemConfig cfg = load_config(default_config_path());
  cfg.profiles.urban_load[7] = 1e6;
  GridParams g = one_coal_unit();
  CHECK_THROWS_AS(grid_cost(TouPriceSchedule{}.prices(), idle_park(), cfg, g), DataError);
}

TEST_CASE("bundled-scenario cost terms tie out against their own arrays") {
  SystemConfig cfg = load_config(default_config_path());
  GridParams g = grid_from_config(cfg);
  ScenarioFlags fl = scenario_flags(4);
  DispatchSolution park = solve_dispatch(cfg, fl);
  REQUIRE(park.status == lp::Status::Optimal);
  auto price = cfg.tou.prices();
  GridCost c = grid_cost(price, park, cfg, g);

  double sell = 0, market_base = 0, coal = 0, gas = 0;
  for (int t = 0; t < kSlots; ++t) {
    CHECK(c.demand_kw[t] == doctest::Approx(cfg.profiles.urban_load[t] + park.buy_e[t]));
    CHECK(c.coal_kw[t] + c.gas_kw[t] + c.pv_kw[t] == doctest::Approx(c.demand_kw[t]).epsilon(1e-9));
    CHECK(c.coal_kw[t] <= g.coal[0].cap_kw + 1e-9);
    CHECK(c.gas_kw[t] <= g.gas[0].cap_kw + 1e-9);
    sell += price[t] * park.buy_e[t];
    market_base += g.coal[0].ef * c.coal_kw[t] + g.gas[0].ef * c.gas_kw[t];
    if (c.coal_kw[t] > 1e-12)
      coal += g.coal[0].a * c.coal_kw[t] * c.coal_kw[t] + g.coal[0].b * c.coal_kw[t] +
              g.coal[0].c;
    gas += g.gas[0].q * c.gas_kw[t];
  }
  CHECK(c.sell == doctest::Approx(sell).epsilon(1e-9));
  CHECK(c.emissions_kg == doctest::Approx(market_base).epsilon(1e-9));
  CHECK(c.market == doctest::Approx(g.carbon_price * market_base).epsilon(1e-9));
  CHECK(c.coal == doctest::Approx(coal).epsilon(1e-9));
  CHECK(c.gas == doctest::Approx(gas).epsilon(1e-9));
}

// ---------------------------------------------------------------------------
// Genetic search
// ---------------------------------------------------------------------------

TEST_CASE("a one-generation run returns the best of the initial population") {
  SystemConfig cfg = load_config(default_config_path());
  GaConfig ga = cfg.ga;
  ga.population = 4;
  ga.generations = 1;
  BilevelResult r = evolve(ga, cfg, scenario_flags(4));
  REQUIRE(r.trace.size() == 1);
  CHECK(r.generations == 1);
  CHECK(r.best_cost.total() == doctest::Approx(r.trace[0]).epsilon(1e-12));
}

TEST_CASE("no variation operators means a flat trace") {
  SystemConfig cfg = load_config(default_config_path());
  GaConfig ga = cfg.ga;
  ga.population = 4;
  ga.generations = 5;
  ga.mutation = 0.0;
  ga.crossover = 0.0;
  ga.patience = 50;  // do not stop early; we want the whole flat trace
  BilevelResult r = evolve(ga, cfg, scenario_flags(4));
  REQUIRE(r.trace.size() == 5);
  for (double f : r.trace) CHECK(f == r.trace[0]);
}

TEST_CASE("the trace never worsens and the run is reproducible") {
  SystemConfig cfg = load_config(default_config_path());
  GaConfig ga = cfg.ga;
  ga.population = 5;
  ga.generations = 4;
  BilevelResult a = evolve(ga, cfg, scenario_flags(4));
  BilevelResult b = evolve(ga, cfg, scenario_flags(4));
  for (size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i] <= a.trace[i - 1]);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i] == b.trace[i]);
  for (int t = 0; t < kSlots; ++t) CHECK(a.best_prices[t] == b.best_prices[t]);
  CHECK(a.best_cost.total() == b.best_cost.total());

  // the best tariff respects the configured bounds everywhere
  for (int t = 0; t < kSlots; ++t) {
    CHECK(a.best_prices[t] >= cfg.grid.price_floor - 1e-12);
    CHECK(a.best_prices[t] <= cfg.grid.price_cap + 1e-12);
  }

  // the static tariff sits in the population, so the GA can never lose to it
  DispatchSolution park = solve_dispatch(cfg, scenario_flags(4));
  REQUIRE(park.status == lp::Status::Optimal);
  double baseline =
      grid_cost(cfg.tou.prices(), park, cfg, grid_from_config(cfg)).total();
  CHECK(a.trace.back() <= baseline + 1e-9);
}

TEST_CASE("a different seed explores differently") {
  SystemConfig cfg = load_config(default_config_path());
  GaConfig ga = cfg.ga;
  ga.population = 5;
  ga.generations = 3;
  BilevelResult a = evolve(ga, cfg, scenario_flags(4));
  cfg.seed = cfg.seed + 17;
  BilevelResult b = evolve(ga, cfg, scenario_flags(4));
  bool same = true;
  for (int t = 0; t < kSlots; ++t) same = same && a.best_prices[t] == b.best_prices[t];
  CHECK(!same);  // astronomically unlikely to coincide
}

TEST_CASE("an unservable park fails loudly with the lower-level diagnosis") {
  SystemConfig cfg = load_config(default_config_path());
  for (int t = 0; t < kSlots; ++t) cfg.profiles.load_e[t] = 5e6;
  derive(cfg);
  GaConfig ga = cfg.ga;
  ga.population = 4;
  ga.generations = 1;
  CHECK_THROWS_AS(evolve(ga, cfg, scenario_flags(4)), DataError);
}

TEST_CASE("ga parameter sanity is enforced") {
  SystemConfig cfg = load_config(default_config_path());
  GaConfig ga = cfg.ga;
  ga.population = 2;
  CHECK_THROWS_AS(evolve(ga, cfg, scenario_flags(4)), ConfigError);
  ga = cfg.ga;
  ga.generations = 0;
  CHECK_THROWS_AS(evolve(ga, cfg, scenario_flags(4)), ConfigError);
  ga = cfg.ga;
  ga.mutation = 1.5;
  CHECK_THROWS_AS(evolve(ga, cfg, scenario_flags(4)), ConfigError);
}
