#pragma once

#include <string>
#include <string_view>

namespace mpnet {

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

/// Strict parse of a complete decimal token; throws std::invalid_argument.
double parse_double(std::string_view text);

long long parse_int(std::string_view text);

}  // namespace mpnet
