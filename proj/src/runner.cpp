#include "ries/runner.hpp"

#include <fmt/format.h>

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <vector>

#include "ries/bilevel.hpp"
#include "ries/csv.hpp"
#include "ries/dispatch.hpp"
#include "ries/sensitivity.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ries {

namespace {

std::string timestamp_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  localtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

// <out_root>/<timestamp>/<command>/, suffixed -2, -3, ... on collision so
// rapid back-to-back runs never overwrite each other.
fs::path make_run_dir(const std::string& out_root, const std::string& command) {
  std::string stamp = timestamp_now();
  for (int i = 1; i < 1000; ++i) {
    fs::path dir = fs::path(out_root) / (i == 1 ? stamp : fmt::format("{}-{}", stamp, i)) /
                   command;
    if (!fs::exists(dir)) {
      fs::create_directories(dir);
      return dir;
    }
  }
  throw DataError("could not allocate a fresh run directory under " + out_root);
}

struct Manifest {
  std::string command;
  std::string config_path;
  json flags = json::object();
  long seed = 0;
  std::vector<std::string> outputs;

  void write(const fs::path& dir) const {
    json m;
    m["command"] = command;
    m["config"] = config_path;
    m["flags"] = flags;
    m["seed"] = seed;
    m["timestamp"] = timestamp_now();
    m["version"] = kArtifactVersion;
    m["outputs"] = outputs;
    std::ofstream f(dir / "manifest.json");
    f << m.dump(2) << "\n";
  }
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  f << j.dump(2) << "\n";
}

// One row per slot, inputs then every decision column, full precision.
void write_balance_csv(const fs::path& path, const HorizonData& h,
                       const DispatchSolution& s) {
  std::vector<std::pair<const char*, const std::vector<double>*>> cols = {
      {"price_e", &s.price_e},   {"load_e", &h.load_e},
      {"load_h_fix", &h.load_h_fix}, {"heating_base", &h.heating_base},
      {"wind", &s.wind},         {"pv", &s.pv},
      {"chp_e", &s.chp_e},       {"chp_h", &s.chp_h},
      {"pg_used", &s.pg_used},   {"ng_chp", &s.ng_chp},
      {"gt_e", &s.gt_e},         {"gt_gas", &s.gt_gas},
      {"whb_h", &s.whb_h},       {"gb_h", &s.gb_h},
      {"gb_gas", &s.gb_gas},     {"eb_in", &s.eb_in},
      {"eb_h", &s.eb_h},         {"buy_e", &s.buy_e},
      {"buy_gas", &s.buy_gas},   {"es_ch", &s.es_ch},
      {"es_dis", &s.es_dis},     {"es_soc", &s.es_soc},
      {"ts_ch", &s.ts_ch},       {"ts_dis", &s.ts_dis},
      {"ts_soc", &s.ts_soc},     {"upg_in", &s.upg_in},
      {"upg_out", &s.upg_out},   {"b2g_e", &s.b2g_e},
      {"ib_dn", &s.ib_dn},       {"ib_up", &s.ib_up},
      {"pb_delta", &s.pb_delta}, {"rep", &s.rep},
      {"th_shift", &s.th_shift}, {"th_curtail", &s.th_curtail},
      {"heat_deliver", &s.heat_deliver}, {"t_in", &s.t_in}};
  CsvTable t;
  t.header.push_back("slot");
  for (const auto& [name, series] : cols) t.header.push_back(name);
  for (int i = 0; i < s.T; ++i) {
    std::vector<std::string> row;
    row.push_back(std::to_string(i));
    for (const auto& [name, series] : cols)
      row.push_back(fmt_full((*series)[static_cast<size_t>(i)]));
    t.rows.push_back(std::move(row));
  }
  write_csv(path.string(), t);
}

SystemConfig load_with_seed(const RunOptions& opt) {
  SystemConfig cfg = load_config(opt.config_path);
  if (opt.seed) {
    cfg.seed = *opt.seed;
    derive(cfg);
  }
  return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------
// scenarios
// ---------------------------------------------------------------------------

int run_scenarios(const RunOptions& opt) {
  SystemConfig cfg = load_with_seed(opt);
  fs::path dir = make_run_dir(opt.out_root, "scenarios");
  Manifest man{"scenarios", opt.config_path, json::object(), cfg.seed, {}};

  CsvTable table;
  table.header = {"scenario",          "total_cost_yuan", "purchase_cost_yuan",
                  "om_cost_yuan",      "carbon_cost_yuan", "emissions_kg"};
  fmt::print("{:>8} {:>14} {:>14} {:>12} {:>12} {:>14}\n", "scenario", "total/yuan",
             "purchase/yuan", "o&m/yuan", "carbon/yuan", "emissions/kg");

  bool all_ok = true;
  for (int s = 1; s <= 4; ++s) {
    ScenarioFlags flags = scenario_flags(s);
    HorizonData h = make_horizon(cfg, flags);
    DispatchSolution sol = solve_dispatch(h, flags);
    if (sol.status != lp::Status::Optimal) {
      fmt::print(stderr, "scenario {}: {}\n", s, sol.infeasible_reason);
      all_ok = false;
      continue;
    }
    VerifyReport rep = verify_solution(h, flags, sol);
    if (!rep.ok()) {
      fmt::print(stderr, "scenario {}: audit failed: {}\n", s, rep.first_failure());
      all_ok = false;
    }
    std::string balance = fmt::format("scenario{}_balance.csv", s);
    write_balance_csv(dir / balance, h, sol);
    man.outputs.push_back(balance);
    table.rows.push_back({std::to_string(s), fmt_full(sol.cost.total()),
                          fmt_full(sol.cost.c_buy()), fmt_full(sol.cost.c_om()),
                          fmt_full(sol.cost.cet), fmt_full(sol.ledger.e_total_kg)});
    fmt::print("{:>8} {:>14.6g} {:>14.6g} {:>12.6g} {:>12.6g} {:>14.6g}\n", s,
               sol.cost.total(), sol.cost.c_buy(), sol.cost.c_om(), sol.cost.cet,
               sol.ledger.e_total_kg);
  }
  write_csv((dir / "comparison.csv").string(), table);
  man.outputs.push_back("comparison.csv");
  man.write(dir);
  fmt::print("wrote {}\n", dir.string());
  return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// bilevel
// ---------------------------------------------------------------------------

int run_bilevel(const RunOptions& opt) {
  SystemConfig cfg = load_with_seed(opt);
  if (opt.ga_generations) cfg.ga.generations = *opt.ga_generations;
  if (opt.ga_population) cfg.ga.population = *opt.ga_population;
  if (opt.ga_mutation) cfg.ga.mutation = *opt.ga_mutation;
  ScenarioFlags flags = scenario_flags(opt.scenario);

  fs::path dir = make_run_dir(opt.out_root, "bilevel");
  Manifest man{"bilevel", opt.config_path,
               json{{"scenario", opt.scenario},
                    {"generations", cfg.ga.generations},
                    {"population", cfg.ga.population},
                    {"mutation", cfg.ga.mutation}},
               cfg.seed,
               {}};

  BilevelResult res = evolve(cfg.ga, cfg, flags);

  TimeProfile prices;
  prices.name = "selling_price";
  prices.unit = Unit::YuanPerKwh;
  for (int t = 0; t < kSlots; ++t) prices[t] = res.best_prices[static_cast<size_t>(t)];
  write_profile_csv((dir / "prices.csv").string(), prices);
  man.outputs.push_back("prices.csv");

  CsvTable trace;
  trace.header = {"generation", "best_fitness"};
  for (size_t i = 0; i < res.trace.size(); ++i)
    trace.rows.push_back({std::to_string(i + 1), fmt_full(res.trace[i])});
  write_csv((dir / "trace.csv").string(), trace);
  man.outputs.push_back("trace.csv");

  json chrom;
  for (const auto& s : res.best.seg)
    chrom["segments"].push_back({{"start", s.start}, {"price", s.price}});
  write_json(dir / "chromosome.json", chrom);
  man.outputs.push_back("chromosome.json");

  json summary{{"grid_cost",
                {{"coal", res.best_cost.coal},
                 {"gas", res.best_cost.gas},
                 {"curtailment", res.best_cost.curtail},
                 {"carbon_market", res.best_cost.market},
                 {"sales_revenue", res.best_cost.sell},
                 {"total", res.best_cost.total()}}},
               {"grid_emissions_kg", res.best_cost.emissions_kg},
               {"generations", res.generations},
               {"converged", res.converged},
               {"lower_level_solves", res.lp_solves},
               {"park",
                {{"total_cost", res.park.cost.total()},
                 {"emissions_kg", res.park.ledger.e_total_kg}}}};
  write_json(dir / "summary.json", summary);
  man.outputs.push_back("summary.json");

  std::optional<std::array<double, kSlots>> parr = res.best_prices;
  HorizonData h = make_horizon(cfg, flags, parr);
  write_balance_csv(dir / "park_balance.csv", h, res.park);
  man.outputs.push_back("park_balance.csv");

  VerifyReport rep = verify_solution(h, flags, res.park);
  if (!rep.ok()) fmt::print(stderr, "park audit failed: {}\n", rep.first_failure());

  man.write(dir);
  fmt::print("best grid cost {:.6g} yuan after {} generations ({} solves){}\n",
             res.best_cost.total(), res.generations, res.lp_solves,
             res.converged ? ", converged" : "");
  fmt::print("wrote {}\n", dir.string());
  return rep.ok() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sensitivity
// ---------------------------------------------------------------------------

int run_sensitivity_cmd(const RunOptions& opt) {
  SystemConfig cfg = load_with_seed(opt);
  std::vector<std::string> ids;
  if (opt.params != "all") {
    std::string cur;
    for (char ch : opt.params + ",") {
      if (ch == ',') {
        if (!cur.empty()) ids.push_back(cur);
        cur.clear();
      } else if (!std::isspace(static_cast<unsigned char>(ch))) {
        cur.push_back(ch);
      }
    }
  }

  fs::path dir = make_run_dir(opt.out_root, "sensitivity");
  Manifest man{"sensitivity", opt.config_path,
               json{{"params", opt.params}, {"samples", opt.samples ? *opt.samples : 0}},
               cfg.seed,
               {}};

  SensitivityReport rep = run_sensitivity(cfg, ids, opt.samples ? *opt.samples : 0);

  CsvTable sweep;
  sweep.header = {"param", "normalized_value", "emissions_kg"};
  for (const auto& p : rep.params)
    for (const auto& s : p.samples)
      if (s.feasible)
        sweep.rows.push_back({p.id, fmt_full(s.normalized), fmt_full(s.emissions_kg)});
  write_csv((dir / "sweep.csv").string(), sweep);
  man.outputs.push_back("sweep.csv");

  json jr{{"base_emissions_kg", rep.base_emissions_kg}, {"parameters", json::array()}};
  fmt::print("{:<5} {:<22} {:>9} {:>11} {:>6} {:>5}\n", "id", "field", "r", "spread/kg",
             "class", "rank");
  for (const auto& p : rep.params) {
    json jp{{"id", p.id},
            {"field", p.field},
            {"label", p.label},
            {"range", {p.lo, p.hi}},
            {"samples", p.samples.size()},
            {"feasible", p.feasible_count},
            {"degenerate", p.degenerate},
            {"spread_kg", p.spread_kg},
            {"score", p.score},
            {"class", p.sens_class},
            {"rank", p.rank}};
    if (!p.degenerate) jp["pearson_r"] = p.pearson_r;
    jr["parameters"].push_back(jp);
    fmt::print("{:<5} {:<22} {:>9} {:>11.6g} {:>6} {:>5}\n", p.id, p.field,
               p.degenerate ? "n/a" : fmt::format("{:+.4f}", p.pearson_r), p.spread_kg,
               p.sens_class, p.rank);
  }
  write_json(dir / "report.json", jr);
  man.outputs.push_back("report.json");
  man.write(dir);
  fmt::print("wrote {}\n", dir.string());
  return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int run_validate(const RunOptions& opt) {
  SystemConfig cfg = load_config(opt.config_path);  // throws on first violation
  fmt::print("config ok: {}\n", opt.config_path);
  fmt::print("  electric peak {:.6g} kW, thermal peak {:.6g} kW (incl. digester/heating)\n",
             cfg.profiles.load_e.max(), cfg.derived.load_h_total.max());
  fmt::print("  wind forecast peak {:.6g} kW, pv forecast peak {:.6g} kW\n",
             cfg.derived.wind_fore.max(), cfg.derived.pv_fore.max());
  fmt::print("  pyrolysis gas {:.6g} kWh/day, raw biogas {:.6g} Nm3/day\n",
             cfg.derived.pg_energy.total(), cfg.derived.biogas.total());
  return 0;
}

}  // namespace ries
