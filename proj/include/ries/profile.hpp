#pragma once
#include <array>
#include <string>

#include "ries/common.hpp"

namespace ries {

enum class Unit { kW, kWh, Nm3, Kg, M3, YuanPerKwh, Celsius, MPerS, WPerM2, Scalar };

std::string unit_name(Unit u);

// Hourly profile over the 24-slot horizon. Temperatures (and wind speed /
// irradiance raw inputs) may be negative or zero; power, energy, fuel and
// price profiles must be non-negative. All entries must be finite.
struct TimeProfile {
  std::array<double, kSlots> v{};
  Unit unit = Unit::kW;
  std::string name;  // diagnostic label, e.g. source file stem

  double operator[](int t) const { return v[static_cast<size_t>(t)]; }
  double& operator[](int t) { return v[static_cast<size_t>(t)]; }

  double total() const {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }
  double max() const {
    double m = v[0];
    for (double x : v) m = x > m ? x : m;
    return m;
  }

  // Throws DataError naming the profile and first offending slot.
  void validate() const;
};

TimeProfile constant_profile(double value, Unit unit, const std::string& name = "");

}  // namespace ries
