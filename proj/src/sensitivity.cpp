#include "ries/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ries/dispatch.hpp"

namespace ries {

std::vector<SweepSpec> standard_sweeps() {
  auto f = [](auto setter) {
    return std::function<void(SystemConfig&, double)>(setter);
  };
  std::vector<SweepSpec> s;
  // The big conversion efficiencies carry most of the fuel flow, so they get
  // their full credible engineering bands; everything downstream gets a
  // tighter band around its bundled value.
  s.push_back({"F1", "gt.eta_e", "gas turbine electrical efficiency", 0.25, 0.35, 11,
               f([](SystemConfig& c, double v) { c.gt.eta_e = v; })});
  s.push_back({"F2", "gb.eta_h", "gas boiler heating efficiency", 0.80, 0.96, 11,
               f([](SystemConfig& c, double v) { c.gb.eta_h = v; })});
  s.push_back({"F3", "pyro.eta_pf", "pyrolysis furnace fuel yield", 0.77, 0.87, 11,
               f([](SystemConfig& c, double v) { c.pyro.eta_pf = v; })});
  s.push_back({"F4", "pyro.eta_pg", "pyrolysis gas conversion efficiency", 0.80, 0.90, 11,
               f([](SystemConfig& c, double v) { c.pyro.eta_pg = v; })});
  s.push_back({"F5", "carbon.grid_ef", "grid purchase emission factor", 0.1925, 0.2075, 11,
               f([](SystemConfig& c, double v) { c.carbon.grid_ef_kg_kwh = v; })});
  s.push_back({"F6", "dispatch.heat_loss", "thermal delivery loss rate", 0.043, 0.057, 11,
               f([](SystemConfig& c, double v) { c.dispatch.heat_loss = v; })});
  s.push_back({"F7", "gt.eta_h", "turbine waste-heat recovery efficiency", 0.40, 0.44, 11,
               f([](SystemConfig& c, double v) { c.gt.eta_h = v; })});
  s.push_back({"F8", "storage_e.eta_ch", "battery charging efficiency", 0.80, 0.90, 11,
               f([](SystemConfig& c, double v) { c.storage_e.eta_ch = v; })});
  s.push_back({"F9", "storage_e.eta_dis", "battery discharging efficiency", 0.85, 0.95, 11,
               f([](SystemConfig& c, double v) { c.storage_e.eta_dis = v; })});
  s.push_back({"F10", "eb.eta", "electric boiler efficiency", 0.90, 0.99, 11,
               f([](SystemConfig& c, double v) { c.eb.eta = v; })});
  // Swept as the derating magnitude; the stored coefficient is negative.
  s.push_back({"F11", "pv.temp_coeff", "PV temperature derating magnitude", 0.0025, 0.0045, 11,
               f([](SystemConfig& c, double v) { c.pv.temp_coeff = -v; })});
  s.push_back({"F12", "upgrade.eta_b2g", "biogas upgrading recovery", 0.86, 0.94, 11,
               f([](SystemConfig& c, double v) { c.upgrade.eta_b2g = v; })});
  s.push_back({"F13", "carbon.quota_elec", "electricity carbon allowance", 0.20, 0.48, 11,
               f([](SystemConfig& c, double v) { c.carbon.quota_elec = v; })});
  s.push_back({"F14", "carbon.quota_gas", "boiler-heat carbon allowance", 0.12, 0.36, 11,
               f([](SystemConfig& c, double v) { c.carbon.quota_gas = v; })});
  // Grid-side generation cost coefficients do not reach the park when the
  // tariff is held fixed; they stay in the roster and report as degenerate.
  s.push_back({"F15", "grid.coal_b", "coal marginal cost coefficient", 0.25, 0.37, 11,
               f([](SystemConfig& c, double v) { c.grid.coal_b = v; })});
  s.push_back({"F16", "gas_price", "pipeline gas price", 3.10, 3.80, 11,
               f([](SystemConfig& c, double v) { c.gas_price = v; })});
  s.push_back({"F17", "digester.beta_st", "wastewater sludge coefficient", 1.8, 2.2, 11,
               f([](SystemConfig& c, double v) { c.digester.beta_st = v; })});
  s.push_back({"F18", "digester.eta_ab", "fermentable organics fraction", 0.63, 0.77, 11,
               f([](SystemConfig& c, double v) { c.digester.eta_ab = v; })});
  s.push_back({"F19", "digester.beta_sludge", "sludge digestible coefficient", 1.08, 1.32, 11,
               f([](SystemConfig& c, double v) { c.digester.beta_sludge = v; })});
  s.push_back({"F20", "digester.beta_bg", "biogas yield coefficient", 0.57, 0.63, 11,
               f([](SystemConfig& c, double v) { c.digester.beta_bg = v; })});
  s.push_back({"F21", "dispatch.curtail_penalty", "renewable curtailment penalty", 0.01, 0.10, 11,
               f([](SystemConfig& c, double v) { c.dispatch.curtail_penalty = v; })});
  s.push_back({"F22", "digester.alpha1", "tank inner film coefficient", 6.0, 10.0, 11,
               f([](SystemConfig& c, double v) { c.digester.alpha1 = v; })});
  s.push_back({"F23", "digester.alpha2", "tank outer film coefficient", 16.0, 24.0, 11,
               f([](SystemConfig& c, double v) { c.digester.alpha2 = v; })});
  s.push_back({"F24", "digester.theta1", "tank wall conductivity", 1.2, 1.8, 11,
               f([](SystemConfig& c, double v) { c.digester.theta1 = v; })});
  s.push_back({"F25", "digester.theta2", "tank insulation conductivity", 0.032, 0.048, 11,
               f([](SystemConfig& c, double v) { c.digester.theta2 = v; })});
  s.push_back({"F26", "digester.eta_eq", "tank heating equipment efficiency", 0.75, 0.93, 11,
               f([](SystemConfig& c, double v) { c.digester.eta_eq = v; })});
  // Roster completeness: the heat pump is equipment-roster data only, so its
  // COP cannot move the dispatch and the sweep reports degenerate.
  s.push_back({"F27", "hp.cop", "heat pump electric-to-heat ratio", 2.4, 3.6, 11,
               f([](SystemConfig& c, double v) { c.hp.cop = v; })});
  return s;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  size_t n = x.size();
  if (n < 3) throw std::invalid_argument("pearson: need at least 3 samples");
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
  double my = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

ParamResult sweep(const SweepSpec& spec, const SystemConfig& base) {
  if (!(spec.lo < spec.hi)) throw std::invalid_argument("sweep: lo must be < hi");
  if (spec.samples < 3) throw std::invalid_argument("sweep: need at least 3 samples");
  ParamResult res;
  res.id = spec.id;
  res.field = spec.field;
  res.label = spec.label;
  res.lo = spec.lo;
  res.hi = spec.hi;

  const ScenarioFlags flags = scenario_flags(4);
  for (int i = 0; i < spec.samples; ++i) {
    SweepSample smp;
    smp.value = spec.lo + (spec.hi - spec.lo) * double(i) / double(spec.samples - 1);
    smp.normalized = double(i) / double(spec.samples - 1);
    SystemConfig cfg = base;  // every sample starts from a pristine copy
    spec.apply(cfg, smp.value);
    derive(cfg);
    validate(cfg);
    DispatchSolution sol = solve_dispatch(cfg, flags);
    if (sol.status == lp::Status::Optimal) {
      smp.feasible = true;
      smp.emissions_kg = sol.ledger.e_total_kg;
      ++res.feasible_count;
    }
    res.samples.push_back(smp);
  }

  std::vector<double> xs, ys;
  double emin = 0, emax = 0;
  for (const auto& smp : res.samples) {
    if (!smp.feasible) continue;
    xs.push_back(smp.normalized);
    ys.push_back(smp.emissions_kg);
    if (xs.size() == 1) emin = emax = smp.emissions_kg;
    emin = std::min(emin, smp.emissions_kg);
    emax = std::max(emax, smp.emissions_kg);
  }
  res.spread_kg = xs.empty() ? 0.0 : emax - emin;
  // bit-identical emissions can still leave pearson an epsilon variance
  // through the mean's roundoff, so catch flat sweeps on the exact spread
  if (xs.size() < 3 || res.spread_kg <= 0.0) {
    res.degenerate = true;
  } else if (auto r = pearson(xs, ys)) {
    res.pearson_r = *r;
    res.score = std::abs(*r) * res.spread_kg;
  } else {
    res.degenerate = true;
  }
  return res;
}

SensitivityReport run_sensitivity(const SystemConfig& base, const std::vector<std::string>& ids,
                                  int samples_override) {
  std::vector<SweepSpec> roster = standard_sweeps();
  if (!ids.empty()) {
    std::vector<SweepSpec> picked;
    for (const auto& id : ids) {
      auto it = std::find_if(roster.begin(), roster.end(),
                             [&](const SweepSpec& s) { return s.id == id; });
      if (it == roster.end())
        throw std::invalid_argument("unknown sensitivity parameter id: " + id);
      picked.push_back(*it);
    }
    roster = std::move(picked);
  }
  if (samples_override > 0)
    for (auto& s : roster) s.samples = std::max(3, samples_override);

  SensitivityReport rep;
  DispatchSolution base_sol = solve_dispatch(base, scenario_flags(4));
  if (base_sol.status != lp::Status::Optimal)
    throw std::runtime_error("sensitivity: base configuration is infeasible: " +
                             base_sol.infeasible_reason);
  rep.base_emissions_kg = base_sol.ledger.e_total_kg;

  for (const auto& spec : roster) rep.params.push_back(sweep(spec, base));

  // Rank by |r|*spread so a noisy near-flat response cannot outrank a clean
  // monotone one; classification uses raw spread per the 25% cohort rule.
  double max_spread = 0.0;
  for (const auto& p : rep.params) max_spread = std::max(max_spread, p.spread_kg);
  std::vector<int> order(rep.params.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return rep.params[a].score > rep.params[b].score;
  });
  for (size_t pos = 0; pos < order.size(); ++pos) rep.params[order[pos]].rank = int(pos) + 1;
  for (auto& p : rep.params)
    p.sens_class = (max_spread > 0.0 && p.spread_kg > 0.25 * max_spread) ? "High" : "Low";
  return rep;
}

}  // namespace ries
