#pragma once

#include <string>

namespace nc {

// Shortest %.17g rendering: 17 significant digits, round-trip exact.
std::string format_17g(double v);

}  // namespace nc
