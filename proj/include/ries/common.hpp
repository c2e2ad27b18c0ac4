#pragma once
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ries {

// Day-ahead horizon: 24 hourly slots, slot t covers [t:00, t+1:00).
inline constexpr int kSlots = 24;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool nearly_equal(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace ries
