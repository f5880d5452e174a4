#include "becsq/cli/units.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "becsq/constants.hpp"

namespace becsq::cli {

namespace {

struct Unit {
  std::string_view name;
  Dimension dim;
  double factor;
};

constexpr Unit units[] = {
    {"s", Dimension::time, 1.0},
    {"ms", Dimension::time, 1e-3},
    {"us", Dimension::time, 1e-6},
    {"ns", Dimension::time, 1e-9},
    {"/s", Dimension::rate, 1.0},
    {"1/s", Dimension::rate, 1.0},
    {"rad/s", Dimension::rate, 1.0},
    {"m", Dimension::length, 1.0},
    {"mm", Dimension::length, 1e-3},
    {"um", Dimension::length, 1e-6},
    {"nm", Dimension::length, 1e-9},
    {"rad", Dimension::angle, 1.0},
    {"deg", Dimension::angle, constants::pi / 180.0},
    {"kg", Dimension::mass, 1.0},
    {"u", Dimension::mass, 1.66053906660e-27},
    {"J", Dimension::energy, 1.0},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_string(Dimension d) {
  switch (d) {
    case Dimension::time:
      return "time (s, ms, us, ns)";
    case Dimension::rate:
      return "rate (/s, 1/s, rad/s)";
    case Dimension::length:
      return "length (m, mm, um, nm)";
    case Dimension::angle:
      return "angle (rad, deg)";
    case Dimension::mass:
      return "mass (kg, u)";
    case Dimension::energy:
      return "energy (J)";
  }
  return "?";
}

double parse_quantity(std::string_view text, Dimension expected) {
  const auto s = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || end == s.data())
    throw std::invalid_argument("expected '<number> <unit>', got '" + std::string(text) + "'");
  const auto unit = trim(std::string_view(end, static_cast<std::size_t>(s.data() + s.size() - end)));
  if (unit.empty())
    throw std::invalid_argument("missing unit in '" + std::string(text) + "', expected " + to_string(expected));
  for (const auto& u : units) {
    if (u.name != unit) continue;
    if (u.dim != expected)
      throw std::invalid_argument("unit '" + std::string(unit) + "' is not a " + to_string(expected));
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite value in '" + std::string(text) + "'");
    return value * u.factor;
  }
  throw std::invalid_argument("unknown unit '" + std::string(unit) + "', expected " + to_string(expected));
}

}  // namespace becsq::cli
