#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "gridbus/core/types.hpp"

namespace gridbus {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

/// Exact decimal text of a money amount with trailing zeros dropped.
inline std::string format_money(Money m) {
  const std::int64_t v = m.micros();
  const std::uint64_t mag = v < 0 ? 0 - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
  std::string out = (v < 0 ? "-" : "") + std::to_string(mag / Money::kScale);
  std::uint64_t frac = mag % Money::kScale;
  if (frac == 0) return out;
  std::string digits = std::to_string(frac);
  digits.insert(0, 6 - digits.size(), '0');
  while (digits.back() == '0') digits.pop_back();
  return out + "." + digits;
}

}  // namespace gridbus
