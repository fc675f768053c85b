#pragma once

#include <string>

namespace pathhj {

/// Shortest-safe round-trip text for a double ("%.17g").
std::string format_double(double value);

}  // namespace pathhj
