#pragma once

#include <string>

namespace outage {

// Absolute tolerance for every bound comparison (power, fuel, currency).
inline constexpr double kTolerance = 1e-6;

// Solutions and instances are rendered with this many significant digits.
inline constexpr int kSignificantDigits = 9;

// Nearest double to the 9-significant-digit decimal rendering of `value`.
// Values produced this way survive a text round trip bit for bit.
double canonical(double value);

// Largest canonical value that is <= `value`.
double canonical_down(double value);

// Smallest canonical value that is >= `value`.
double canonical_up(double value);

// 9-significant-digit text (shortest form that reparses to the same double).
std::string format_decimal(double value);

}  // namespace outage
