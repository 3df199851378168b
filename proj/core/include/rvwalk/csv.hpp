#pragma once

#include <ostream>
#include <string>

namespace rvwalk {

// Shortest-safe decimal with 17 significant digits.
std::string format_double(double x);

inline void put(std::ostream& os, double x) { os << format_double(x); }

} // namespace rvwalk
