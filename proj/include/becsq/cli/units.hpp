#pragma once

// Quantities written as "<number> <unit>", converted to SI.

#include <string>
#include <string_view>

namespace becsq::cli {

enum class Dimension { time, rate, length, angle, mass, energy };

std::string to_string(Dimension d);

/// Parses e.g. "0.4 ms" or "2.67e-2 /s" and returns the SI value. Throws
/// std::invalid_argument when the unit is missing, unknown or of the wrong
/// dimension.
double parse_quantity(std::string_view text, Dimension expected);

}  // namespace becsq::cli
