#pragma once
#include <optional>
#include <string>

#include "ries/config.hpp"

namespace ries {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Effective settings for one CLI invocation. Optionals override the config.
struct RunOptions {
  std::string config_path = "data/default/config.ini";
  std::string out_root = "out";
  std::optional<long> seed;
  int scenario = 4;  // lower level for the bilevel search
  std::optional<int> ga_generations;
  std::optional<int> ga_population;
  std::optional<double> ga_mutation;
  std::string params = "all";  // sensitivity roster: all | F1,F7,...
  std::optional<int> samples;  // sweep samples per parameter
};

// Each command writes into <out_root>/<timestamp>/<command>/ and finishes
// with manifest.json listing every file it wrote. Returns the process exit
// code: 0 iff everything solved and passed the independent audit.
int run_scenarios(const RunOptions& opt);
int run_bilevel(const RunOptions& opt);
int run_sensitivity_cmd(const RunOptions& opt);
int run_validate(const RunOptions& opt);  // config lint, no output directory

}  // namespace ries
