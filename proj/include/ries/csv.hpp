#pragma once
#include <string>
#include <vector>

#include "ries/profile.hpp"

namespace ries {

// Profile CSV: header "slot,value", then exactly 24 rows with slot = 0..23 in
// order. Stricter than a generic CSV reader on purpose: dispatch inputs and
// outputs must round-trip bit-exactly.
TimeProfile read_profile_csv(const std::string& path, Unit unit);
void write_profile_csv(const std::string& path, const TimeProfile& p);

// Generic helpers for result tables.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& t);

// Full-precision formatting: shortest string that parses back to the same
// double (%.17g is always sufficient).
std::string fmt_full(double x);

}  // namespace ries
