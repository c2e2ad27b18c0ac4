#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "ries/config.hpp"
#include "ries/dispatch.hpp"

namespace ries {

// ---------------------------------------------------------------------------
// Upper level: the distribution grid prices electricity sold to the park,
// serves the park's purchases plus an exogenous urban load from its own
// fleet (quadratic coal + linear gas + free PV), and pays a flat carbon
// price on fleet emissions. Fitness of a tariff = grid cost after the park
// re-dispatches against it.
// ---------------------------------------------------------------------------

struct CoalUnit {
  double a = 0;       // yuan/kWh^2
  double b = 0;       // yuan/kWh
  double c = 0;       // yuan per committed hour
  double cap_kw = 0;
  double ef = 0;      // kg/kWh
};

struct GasUnit {
  double q = 0;       // yuan/kWh
  double cap_kw = 0;
  double ef = 0;      // kg/kWh
};

struct GridParams {
  std::vector<CoalUnit> coal;
  std::vector<GasUnit> gas;
  double curtail_penalty = 0.05;  // yuan/kWh spilled grid PV
  double carbon_price = 0.3;      // yuan/kg on fleet emissions
  double price_floor = 0.20;      // tariff bounds offered to the GA
  double price_cap = 1.20;

  void validate() const;  // throws ConfigError
};

// One coal + one gas unit taken from cfg.grid.
GridParams grid_from_config(const SystemConfig& cfg);

// Piecewise-constant day tariff. Segment i covers slots
// [seg[i].start, seg[i+1].start); the last segment runs to slot 23.
struct PriceSegment {
  int start = 0;
  double price = 0;
};

struct PriceChromosome {
  std::vector<PriceSegment> seg;

  // Throws ConfigError unless: 1..12 segments, seg[0].start == 0, starts
  // strictly increasing within 0..23, prices within [floor, cap].
  void validate(double floor, double cap) const;
};

std::array<double, kSlots> decode_chromosome(const PriceChromosome& c);

// The bundled three-tier tariff expressed as a chromosome (the static
// baseline every search population is seeded with).
PriceChromosome tou_chromosome(const TouPriceSchedule& tou);

struct GridCost {
  double coal = 0;     // quadratic fuel cost over committed coal hours
  double gas = 0;      // linear gas fleet cost
  double curtail = 0;  // spilled grid-side PV penalty
  double market = 0;   // flat-price carbon settlement on fleet emissions
  double sell = 0;     // revenue from energy sold to the park
  double total() const { return coal + gas + curtail + market - sell; }

  // fleet dispatch behind the numbers (diagnostics / balance export)
  std::array<double, kSlots> coal_kw{}, gas_kw{}, pv_kw{}, demand_kw{};
  double emissions_kg = 0;
};

// Merit-order fleet dispatch (PV free, then equal-marginal coal/gas) serving
// urban load + park purchases each slot. Throws DataError when demand
// exceeds fleet capability in some slot.
GridCost grid_cost(const std::array<double, kSlots>& price,
                   const DispatchSolution& park, const SystemConfig& cfg,
                   const GridParams& g);

// Infeasible lower level maps to this fitness instead of crashing the run.
inline constexpr double kPenaltyFitness = 1e12;

struct BilevelResult {
  PriceChromosome best;
  std::array<double, kSlots> best_prices{};
  GridCost best_cost;
  DispatchSolution park;          // park response to the best tariff
  std::vector<double> trace;      // best fitness after each generation
  int generations = 0;            // generations actually run (== trace size)
  bool converged = false;         // stopped on eps/patience before the cap
  int lp_solves = 0;              // distinct lower-level evaluations
};

// Algorithm: seeded population (individual 0 = static tariff), tournament-2
// selection with 1-elitism, one-point segment crossover, Gaussian price
// mutation plus split/merge structural moves; deterministic per-individual
// streams derived from (cfg.seed, generation, index). Generation 1 is the
// evaluation of the initial population. Throws DataError if every
// individual of the final population is penalized.
BilevelResult evolve(const GaConfig& ga, const SystemConfig& cfg,
                     const ScenarioFlags& flags);

}  // namespace ries
