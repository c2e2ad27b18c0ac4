#include "ries/bilevel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ries/rng.hpp"

namespace ries {

void GridParams::validate() const {
  if (coal.empty() && gas.empty()) throw ConfigError("grid fleet is empty");
  for (const auto& u : coal) {
    if (u.a < 0) throw ConfigError("coal unit a < 0");
    if (u.cap_kw <= 0) throw ConfigError("coal unit capacity <= 0");
    if (u.ef < 0) throw ConfigError("coal unit emission factor < 0");
  }
  for (const auto& u : gas) {
    if (u.cap_kw <= 0) throw ConfigError("gas unit capacity <= 0");
    if (u.ef < 0) throw ConfigError("gas unit emission factor < 0");
  }
  if (!(price_floor > 0) || !(price_cap > price_floor))
    throw ConfigError("grid price bounds must satisfy 0 < floor < cap");
  if (curtail_penalty < 0) throw ConfigError("grid curtailment penalty < 0");
  if (carbon_price < 0) throw ConfigError("grid carbon price < 0");
}

GridParams grid_from_config(const SystemConfig& cfg) {
  const GridSideParams& s = cfg.grid;
  GridParams g;
  g.coal.push_back({s.coal_a, s.coal_b, s.coal_c, s.coal_cap_kw, s.coal_ef});
  g.gas.push_back({s.gas_b, s.gas_cap_kw, s.gas_ef});
  g.curtail_penalty = s.curtail_penalty;
  g.carbon_price = s.beta;
  g.price_floor = s.price_floor;
  g.price_cap = s.price_cap;
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// Chromosome plumbing
// ---------------------------------------------------------------------------

void PriceChromosome::validate(double floor, double cap) const {
  if (seg.empty() || seg.size() > 12)
    throw ConfigError(fmt::format("tariff must have 1..12 segments, got {}", seg.size()));
  if (seg.front().start != 0) throw ConfigError("first tariff segment must start at slot 0");
  for (size_t i = 0; i < seg.size(); ++i) {
    if (seg[i].start < 0 || seg[i].start >= kSlots)
      throw ConfigError(fmt::format("tariff boundary {} outside 0..23", seg[i].start));
    if (i > 0 && seg[i].start <= seg[i - 1].start)
      throw ConfigError("tariff boundaries must be strictly increasing");
    if (seg[i].price < floor - 1e-12 || seg[i].price > cap + 1e-12)
      throw ConfigError(fmt::format("tariff price {:.4f} outside [{:.2f}, {:.2f}]",
                                    seg[i].price, floor, cap));
  }
}

std::array<double, kSlots> decode_chromosome(const PriceChromosome& c) {
  std::array<double, kSlots> p{};
  size_t k = 0;
  for (int t = 0; t < kSlots; ++t) {
    while (k + 1 < c.seg.size() && c.seg[k + 1].start <= t) ++k;
    p[static_cast<size_t>(t)] = c.seg[k].price;
  }
  return p;
}

PriceChromosome tou_chromosome(const TouPriceSchedule& tou) {
  PriceChromosome c;
  for (int t = 0; t < kSlots; ++t) {
    double p = tou.price(t);
    if (c.seg.empty() || std::abs(c.seg.back().price - p) > 1e-12)
      c.seg.push_back({t, p});
  }
  return c;
}

namespace {

// Merge adjacent equal-price segments so structurally different gene lists
// that decode identically compare equal (keeps the cache and the
// identical-parent crossover exact).
void canonicalize(PriceChromosome& c) {
  std::vector<PriceSegment> out;
  for (const auto& s : c.seg) {
    if (!out.empty() && std::abs(out.back().price - s.price) < 1e-12) continue;
    out.push_back(s);
  }
  // crossover can stack up segments; fold the most similar neighbours back in
  while (out.size() > 12) {
    size_t k = 0;
    double dmin = std::abs(out[1].price - out[0].price);
    for (size_t i = 1; i + 1 < out.size(); ++i) {
      double d = std::abs(out[i + 1].price - out[i].price);
      if (d < dmin) dmin = d, k = i;
    }
    out[k].price = 0.5 * (out[k].price + out[k + 1].price);
    out.erase(out.begin() + static_cast<long>(k) + 1);
  }
  c.seg = std::move(out);
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid-side fleet dispatch and cost
// ---------------------------------------------------------------------------

namespace {

struct FleetPoint {
  std::vector<double> coal_p, gas_p;
};

// Equal-marginal dispatch of quadratic coal + linear gas blocks to cover
// `need` kW. Deterministic: marginal linear blocks fill in declaration order.
FleetPoint fleet_dispatch(const GridParams& g, double need, int slot) {
  FleetPoint f;
  f.coal_p.assign(g.coal.size(), 0.0);
  f.gas_p.assign(g.gas.size(), 0.0);
  if (need <= 1e-12) return f;

  double cap_total = 0;
  for (const auto& u : g.coal) cap_total += u.cap_kw;
  for (const auto& u : g.gas) cap_total += u.cap_kw;
  if (need > cap_total + 1e-9)
    throw DataError(fmt::format(
        "grid fleet capacity exceeded at slot {}: demand {:.1f} kW vs {:.1f} kW",
        slot, need, cap_total));

  auto coal_at = [&](double lam) {
    double s = 0;
    for (const auto& u : g.coal) {
      double p = u.a > 0 ? (lam - u.b) / (2.0 * u.a) : (lam >= u.b ? u.cap_kw : 0.0);
      s += std::clamp(p, 0.0, u.cap_kw);
    }
    return s;
  };
  // supply available strictly below price lam (gas blocks exclusive)
  auto below = [&](double lam) {
    double s = coal_at(lam);
    for (const auto& u : g.gas)
      if (u.q < lam) s += u.cap_kw;
    return s;
  };

  double lo = 0, hi = 1.0;
  for (const auto& u : g.coal) hi = std::max(hi, u.b + 2.0 * u.a * u.cap_kw);
  for (const auto& u : g.gas) hi = std::max(hi, u.q);
  hi += 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (below(mid) >= need ? hi : lo) = mid;
  }
  double lam = hi;  // infimum marginal price covering `need`

  for (size_t i = 0; i < g.coal.size(); ++i) {
    const auto& u = g.coal[i];
    double p = u.a > 0 ? (lam - u.b) / (2.0 * u.a) : (lam >= u.b ? u.cap_kw : 0.0);
    f.coal_p[i] = std::clamp(p, 0.0, u.cap_kw);
  }
  double assigned = 0;
  for (double p : f.coal_p) assigned += p;
  for (size_t i = 0; i < g.gas.size(); ++i)
    if (g.gas[i].q < lam - 1e-9) {
      f.gas_p[i] = g.gas[i].cap_kw;
      assigned += f.gas_p[i];
    }
  double residual = need - assigned;
  for (size_t i = 0; i < g.gas.size() && residual > 1e-12; ++i) {
    if (g.gas[i].q < lam - 1e-9) continue;  // already full
    double take = std::min(residual, g.gas[i].cap_kw);
    f.gas_p[i] = take;
    residual -= take;
  }
  // numerical slack from the bisection lands on the cheapest unsaturated coal
  if (residual > 1e-12) {
    for (size_t i = 0; i < g.coal.size() && residual > 1e-12; ++i) {
      double take = std::min(residual, g.coal[i].cap_kw - f.coal_p[i]);
      f.coal_p[i] += take;
      residual -= take;
    }
  }
  return f;
}

}  // namespace

GridCost grid_cost(const std::array<double, kSlots>& price,
                   const DispatchSolution& park, const SystemConfig& cfg,
                   const GridParams& g) {
  g.validate();
  if (park.T != kSlots) throw DataError("park response must cover the full day");
  GridCost out;
  double dt = park.dt;
  for (int t = 0; t < kSlots; ++t) {
    size_t ut = static_cast<size_t>(t);
    double buy = park.buy_e[ut];
    double demand = cfg.profiles.urban_load[t] + buy;
    double pv_avail = cfg.profiles.grid_pv[t];
    double pv_used = std::min(pv_avail, demand);
    FleetPoint f = fleet_dispatch(g, demand - pv_used, t);

    out.demand_kw[ut] = demand;
    out.pv_kw[ut] = pv_used;
    for (size_t i = 0; i < g.coal.size(); ++i) {
      double p = f.coal_p[i];
      out.coal_kw[ut] += p;
      if (p > 1e-12) {
        const auto& u = g.coal[i];
        out.coal += (u.a * p * p + u.b * p + u.c) * dt;
        out.emissions_kg += u.ef * p * dt;
      }
    }
    for (size_t i = 0; i < g.gas.size(); ++i) {
      double p = f.gas_p[i];
      out.gas_kw[ut] += p;
      out.gas += g.gas[i].q * p * dt;
      out.emissions_kg += g.gas[i].ef * p * dt;
    }
    out.curtail += g.curtail_penalty * (pv_avail - pv_used) * dt;
    out.sell += price[ut] * buy * dt;
  }
  out.market = g.carbon_price * out.emissions_kg;
  return out;
}

// ---------------------------------------------------------------------------
// Genetic search over tariffs
// ---------------------------------------------------------------------------

namespace {

PriceChromosome random_chromosome(Rng& rng, const GridParams& g) {
  int nseg = 2 + static_cast<int>(rng.below(6));  // 2..7
  std::vector<int> starts{0};
  while (static_cast<int>(starts.size()) < nseg) {
    int s = 1 + static_cast<int>(rng.below(kSlots - 1));
    if (std::find(starts.begin(), starts.end(), s) == starts.end()) starts.push_back(s);
  }
  std::sort(starts.begin(), starts.end());
  PriceChromosome c;
  for (int s : starts) c.seg.push_back({s, rng.uniform(g.price_floor, g.price_cap)});
  canonicalize(c);
  return c;
}

PriceChromosome crossover(const PriceChromosome& a, const PriceChromosome& b,
                          Rng& rng) {
  int cut = 1 + static_cast<int>(rng.below(kSlots - 1));  // 1..23
  auto pb = decode_chromosome(b);
  PriceChromosome c;
  for (const auto& s : a.seg)
    if (s.start < cut) c.seg.push_back(s);
  c.seg.push_back({cut, pb[static_cast<size_t>(cut)]});
  for (const auto& s : b.seg)
    if (s.start > cut) c.seg.push_back(s);
  canonicalize(c);
  return c;
}

void mutate(PriceChromosome& c, Rng& rng, const GaConfig& ga, const GridParams& g) {
  double sigma = 0.05 * (g.price_cap - g.price_floor);
  for (auto& s : c.seg)
    if (rng.u01() < ga.mutation)
      s.price = std::clamp(s.price + sigma * rng.normal(), g.price_floor, g.price_cap);
  // structural: split one segment spanning >= 2 slots
  if (rng.u01() < ga.mutation && c.seg.size() < 12) {
    size_t k = rng.below(c.seg.size());
    int lo = c.seg[k].start + 1;
    int hi = k + 1 < c.seg.size() ? c.seg[k + 1].start : kSlots;
    if (hi - lo >= 1) {
      int at = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo)));
      double p = std::clamp(c.seg[k].price + sigma * rng.normal(), g.price_floor,
                            g.price_cap);
      c.seg.insert(c.seg.begin() + static_cast<long>(k) + 1, {at, p});
    }
  }
  // structural: merge one adjacent pair, span-weighted price
  if (rng.u01() < ga.mutation && c.seg.size() > 2) {
    size_t k = rng.below(c.seg.size() - 1);
    int end = k + 2 < c.seg.size() ? c.seg[k + 2].start : kSlots;
    double w1 = c.seg[k + 1].start - c.seg[k].start;
    double w2 = end - c.seg[k + 1].start;
    c.seg[k].price = (w1 * c.seg[k].price + w2 * c.seg[k + 1].price) / (w1 + w2);
    c.seg.erase(c.seg.begin() + static_cast<long>(k) + 1);
  }
  canonicalize(c);
}

}  // namespace

BilevelResult evolve(const GaConfig& ga, const SystemConfig& cfg,
                     const ScenarioFlags& flags) {
  if (ga.population < 4) throw ConfigError("GA population must be >= 4");
  if (ga.generations < 1) throw ConfigError("GA needs at least one generation");
  if (ga.mutation < 0 || ga.mutation > 1 || ga.crossover < 0 || ga.crossover > 1)
    throw ConfigError("GA rates must lie in [0, 1]");
  GridParams grid = grid_from_config(cfg);
  std::uint64_t seed = static_cast<std::uint64_t>(cfg.seed);

  std::map<std::array<double, kSlots>, double> cache;
  std::string last_infeasible = "no lower-level solve attempted";
  int lp_solves = 0;
  auto fitness = [&](const PriceChromosome& c) {
    auto prices = decode_chromosome(c);
    auto it = cache.find(prices);
    if (it != cache.end()) return it->second;
    DispatchSolution sol = solve_dispatch(cfg, flags, prices);
    ++lp_solves;
    double f = kPenaltyFitness;
    if (sol.status == lp::Status::Optimal)
      f = grid_cost(prices, sol, cfg, grid).total();
    else
      last_infeasible = sol.infeasible_reason;
    cache.emplace(prices, f);
    return f;
  };

  int pop_n = ga.population;
  std::vector<PriceChromosome> pop(static_cast<size_t>(pop_n));
  std::vector<double> fit(static_cast<size_t>(pop_n));
  pop[0] = tou_chromosome(cfg.tou);  // static baseline is always individual 0
  for (int i = 1; i < pop_n; ++i) {
    Rng rng = derive_stream(seed, 0, static_cast<std::uint64_t>(i));
    pop[static_cast<size_t>(i)] = random_chromosome(rng, grid);
  }

  BilevelResult res;
  auto evaluate = [&]() {
    int best = 0;
    for (int i = 0; i < pop_n; ++i) {
      fit[static_cast<size_t>(i)] = fitness(pop[static_cast<size_t>(i)]);
      if (fit[static_cast<size_t>(i)] < fit[static_cast<size_t>(best)]) best = i;
    }
    return best;
  };

  int best_idx = evaluate();
  res.trace.push_back(fit[static_cast<size_t>(best_idx)]);

  int calm = 0;
  for (int gen = 2; gen <= ga.generations; ++gen) {
    std::vector<PriceChromosome> next(static_cast<size_t>(pop_n));
    next[0] = pop[static_cast<size_t>(best_idx)];  // elitism
    for (int i = 1; i < pop_n; ++i) {
      Rng rng = derive_stream(seed, static_cast<std::uint64_t>(gen),
                              static_cast<std::uint64_t>(i));
      auto pick = [&]() {
        int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(pop_n)));
        int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(pop_n)));
        return fit[static_cast<size_t>(x)] <= fit[static_cast<size_t>(y)] ? x : y;
      };
      int pa = pick(), pb = pick();
      PriceChromosome child = rng.u01() < ga.crossover
                                  ? crossover(pop[static_cast<size_t>(pa)],
                                              pop[static_cast<size_t>(pb)], rng)
                                  : pop[static_cast<size_t>(pa)];
      mutate(child, rng, ga, grid);
      child.validate(grid.price_floor, grid.price_cap);
      next[static_cast<size_t>(i)] = std::move(child);
    }
    pop = std::move(next);
    double prev_best = res.trace.back();
    best_idx = evaluate();
    res.trace.push_back(fit[static_cast<size_t>(best_idx)]);
    calm = std::abs(prev_best - res.trace.back()) < ga.eps ? calm + 1 : 0;
    if (calm >= ga.patience) {
      res.converged = true;
      break;
    }
  }

  if (fit[static_cast<size_t>(best_idx)] >= kPenaltyFitness)
    throw DataError("every tariff in the final population left the park infeasible; last reason: " +
                    last_infeasible);

  res.best = pop[static_cast<size_t>(best_idx)];
  res.best_prices = decode_chromosome(res.best);
  res.park = solve_dispatch(cfg, flags, res.best_prices);
  res.best_cost = grid_cost(res.best_prices, res.park, cfg, grid);
  res.generations = static_cast<int>(res.trace.size());
  res.lp_solves = lp_solves;
  return res;
}

}  // namespace ries
