#pragma once
#include <array>

#include "ries/common.hpp"

namespace ries {

enum class TouPeriod { Valley, Flat, Peak };

// Three-tier time-of-use tariff. Default period map: valley 23:00-07:00,
// peak 10:00-15:00 and 18:00-21:00, flat everywhere else.
struct TouPriceSchedule {
  double valley = 0.2988;  // yuan/kWh
  double flat = 0.5855;
  double peak = 0.8882;
  std::array<TouPeriod, kSlots> period = default_period_map();

  static std::array<TouPeriod, kSlots> default_period_map();

  double price(int slot) const;
  std::array<double, kSlots> prices() const;

  // Throws ConfigError unless valley <= flat <= peak and all positive.
  void validate() const;
};

TouPeriod period_of(const TouPriceSchedule& s, int slot);

}  // namespace ries
