#include "outage/numeric.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace outage {

namespace {

double parse_chars(const char* first, const char* last) {
  double out = 0.0;
  std::from_chars(first, last, out);
  return out;
}

}  // namespace

double canonical(double value) {
  if (!std::isfinite(value) || value == 0.0) return value == 0.0 ? 0.0 : value;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general,
                           kSignificantDigits);
  return parse_chars(buf, res.ptr);
}

double canonical_down(double value) {
  double c = canonical(value);
  if (c <= value) return c;
  // Step one unit in the last significant digit toward -inf.
  const double mag = std::fabs(value);
  const int exponent = static_cast<int>(std::floor(std::log10(mag)));
  double unit = std::pow(10.0, exponent - (kSignificantDigits - 1));
  double lower = canonical(c - unit);
  while (lower > value) {
    unit *= 2.0;
    lower = canonical(c - unit);
  }
  return lower;
}

double canonical_up(double value) { return -canonical_down(-value); }

std::string format_decimal(double value) {
  const double c = canonical(value);
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), c);
  return std::string(buf, res.ptr);
}

}  // namespace outage
