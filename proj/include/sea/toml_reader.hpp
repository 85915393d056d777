#pragma once

#include <string_view>

#include "json.hpp"

namespace sea {

// Reads the TOML subset used by scenario files into the equivalent JSON
// document: tables, dotted keys, arrays of tables, basic and literal strings,
// integers, floats (including inf/nan), booleans, multi-line arrays and inline
// tables. Dates and multi-line strings are not supported.
// Throws sea::Error (parse_error) with the offending line.
nlohmann::json parse_toml(std::string_view text);

}  // namespace sea
