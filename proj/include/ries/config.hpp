#pragma once
#include <string>
#include <vector>

#include "ries/biomass.hpp"
#include "ries/carbon.hpp"
#include "ries/common.hpp"
#include "ries/demand_response.hpp"
#include "ries/devices.hpp"
#include "ries/profile.hpp"
#include "ries/tou.hpp"

namespace ries {

// Which optimization mechanisms a run enables. The four study cases:
//   1: neither, 2: demand response only, 3: carbon trading only, 4: both.
struct ScenarioFlags {
  bool demand_response = false;
  bool carbon_trading = false;
};
ScenarioFlags scenario_flags(int scenario_1_to_4);
int scenario_number(const ScenarioFlags& f);

struct DrConfig {
  DrShares shares;
  ElasticityParams elasticity;
  double reference_price = 0.5855;  // tariff users are assumed to anchor on
  bool use_price = true;            // price-elastic shifting active
  bool use_incentive = true;        // tiered incentive offers active
  std::vector<double> ibdr_down_price{0.40, 0.70};
  std::vector<double> ibdr_down_frac{0.50, 0.50};  // of the reducible share
  std::vector<double> ibdr_up_price{0.15};
  std::vector<double> ibdr_up_frac{0.25};
  double replace_price = 0.05;  // yuan/kWh moved from electric to thermal
  double replace_eff = 1.0;     // heat delivered per electric kWh displaced
  double th_shift_share = 0.15;    // of base building heating, per slot
  double th_curtail_share = 0.10;  // of base building heating, per slot
  double th_curtail_price = 0.20;  // yuan/kWh compensation
};

struct DispatchParams {
  double confidence = 0.90;     // chance-constraint confidence on renewables
  double heat_loss = 0.05;      // delivery loss on the thermal bus
  double curtail_penalty = 0.02;  // yuan/kWh of spilled renewable potential
};

// Upper-level (distribution grid) cost model for the bilevel search.
struct GridSideParams {
  double coal_a = 2.4e-5;  // yuan/kWh^2
  double coal_b = 0.31;    // yuan/kWh
  double coal_c = 420.0;   // yuan/h when committed
  double coal_cap_kw = 60000.0;
  double coal_ef = 0.95;   // kg/kWh
  double gas_b = 0.52;
  double gas_cap_kw = 30000.0;
  double gas_ef = 0.42;
  double beta = 0.3;            // yuan/kg on grid-side emissions
  double curtail_penalty = 0.05;  // yuan/kWh spilled grid-side PV
  double price_floor = 0.20;    // bounds for tariffs the grid may propose
  double price_cap = 1.20;
};

struct GaConfig {
  int population = 20;
  int generations = 50;
  double mutation = 0.15;
  double crossover = 0.70;
  double eps = 1e-3;   // best-fitness change considered converged
  int patience = 8;    // consecutive converged generations before stopping
};

struct Profiles {
  TimeProfile load_e;       // kW, electric demand
  TimeProfile load_h;       // kW, process heat (building heating added separately)
  TimeProfile wind_speed;   // m/s
  TimeProfile irradiance;   // W/m2
  TimeProfile outdoor;      // C
  TimeProfile straw;        // kg/h
  TimeProfile dry_garbage;  // kg/h
  TimeProfile wastewater;   // m3/h
  TimeProfile wet_garbage;  // kg/h
  TimeProfile urban_load;   // kW, upper-level service area
  TimeProfile grid_pv;      // kW, upper-level renewable infeed
};

// Deterministic quantities recomputed from raw inputs (re-run `derive` after
// mutating any parameter).
struct Derived {
  TimeProfile wind_fore;      // kW
  TimeProfile pv_fore;        // kW
  TimeProfile pg_energy;      // kWh/h of pyrolysis gas available
  TimeProfile biogas;         // Nm3/h raw digester gas
  TimeProfile digester_heat;  // kW thermal supply needed by the tank
  TimeProfile heating_base;   // kW building heating at the comfort setpoint
  TimeProfile load_h_total;   // kW process + heating + digester
};

struct SystemConfig {
  long seed = 42;
  double gas_price = 3.45;    // yuan/Nm3
  double gas_lhv_kwh = 10.0;  // kWh/Nm3

  TouPriceSchedule tou;
  WindParams wind;
  PvParams pv;
  ChpParams chp;
  GtParams gt;
  GbParams gb;
  EbParams eb;
  HpParams hp;
  StorageParams storage_e;
  StorageParams storage_h;
  PyrolysisParams pyro;
  DigesterParams digester;
  UpgradeParams upgrade;
  CarbonParams carbon;
  DrConfig dr;
  ComfortParams comfort;
  BuildingParams building;
  DispatchParams dispatch;
  GridSideParams grid;
  GaConfig ga;

  Profiles profiles;
  Derived derived;

  std::string base_dir;  // directory the config was loaded from
};

// Loads, validates (`ConfigError` names the first violated invariant) and
// derives. Profile paths resolve relative to the config file.
SystemConfig load_config(const std::string& path);

// Recompute `derived` after any parameter/profile mutation.
void derive(SystemConfig& cfg);

// Throws ConfigError naming the first violated invariant.
void validate(const SystemConfig& cfg);

// Structured-text serialization; writes config.ini plus raw profile CSVs
// into `dir`. serialize_config returns the ini text alone.
std::string serialize_config(const SystemConfig& cfg);
void save_config(const SystemConfig& cfg, const std::string& dir);

}  // namespace ries
