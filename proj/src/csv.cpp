#include "ries/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ries {

std::string unit_name(Unit u) {
  switch (u) {
    case Unit::kW: return "kW";
    case Unit::kWh: return "kWh";
    case Unit::Nm3: return "Nm3";
    case Unit::Kg: return "kg";
    case Unit::M3: return "m3";
    case Unit::YuanPerKwh: return "yuan/kWh";
    case Unit::Celsius: return "C";
    case Unit::MPerS: return "m/s";
    case Unit::WPerM2: return "W/m2";
    case Unit::Scalar: return "-";
  }
  return "?";
}

void TimeProfile::validate() const {
  bool allow_negative =
      unit == Unit::Celsius || unit == Unit::MPerS || unit == Unit::WPerM2;
  for (int t = 0; t < kSlots; ++t) {
    double x = v[static_cast<size_t>(t)];
    if (!std::isfinite(x))
      throw DataError("profile " + name + ": non-finite value at slot " +
                      std::to_string(t));
    if (!allow_negative && x < 0.0)
      throw DataError("profile " + name + ": negative value at slot " +
                      std::to_string(t) + " (" + unit_name(unit) + ")");
  }
}

TimeProfile constant_profile(double value, Unit unit, const std::string& name) {
  TimeProfile p;
  p.unit = unit;
  p.name = name;
  p.v.fill(value);
  return p;
}

std::string fmt_full(double x) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  return buf;
}

namespace {
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}
}  // namespace

TimeProfile read_profile_csv(const std::string& path, Unit unit) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open profile: " + path);
  std::string stem = path;
  if (auto pos = stem.find_last_of('/'); pos != std::string::npos)
    stem = stem.substr(pos + 1);
  if (auto pos = stem.rfind(".csv"); pos != std::string::npos) stem = stem.substr(0, pos);

  TimeProfile p;
  p.unit = unit;
  p.name = stem;

  std::string line;
  if (!std::getline(in, line)) throw DataError("profile " + path + ": empty file");
  auto hdr = split_line(line);
  if (hdr.size() != 2 || hdr[0] != "slot" || hdr[1] != "value")
    throw DataError("profile " + path + ": header must be 'slot,value'");

  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_line(line);
    if (f.size() != 2)
      throw DataError("profile " + path + ": row " + std::to_string(n) +
                      ": expected 2 fields");
    char* end = nullptr;
    long slot = std::strtol(f[0].c_str(), &end, 10);
    if (end == f[0].c_str() || *end != '\0' || slot != n)
      throw DataError("profile " + path + ": expected slot " + std::to_string(n) +
                      ", got '" + f[0] + "'");
    if (n >= kSlots) throw DataError("profile " + path + ": more than 24 rows");
    double val = std::strtod(f[1].c_str(), &end);
    if (end == f[1].c_str() || *end != '\0')
      throw DataError("profile " + path + ": bad value '" + f[1] + "' at slot " +
                      std::to_string(n));
    p.v[static_cast<size_t>(n)] = val;
    ++n;
  }
  if (n != kSlots)
    throw DataError("profile " + path + ": expected 24 rows, got " + std::to_string(n));
  p.validate();
  return p;
}

void write_profile_csv(const std::string& path, const TimeProfile& p) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write profile: " + path);
  out << "slot,value\n";
  for (int t = 0; t < kSlots; ++t)
    out << t << "," << fmt_full(p[t]) << "\n";
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open csv: " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_line(line);
    if (first) {
      t.header = f;
      first = false;
    } else {
      t.rows.push_back(f);
    }
  }
  return t;
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write csv: " + path);
  auto emit = [&out](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << row[i];
    }
    out << "\n";
  };
  emit(t.header);
  for (const auto& r : t.rows) emit(r);
}

}  // namespace ries
