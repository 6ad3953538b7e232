#pragma once

// Build-tree helper shared by the io code and the command-line tool; it pulls
// in nlohmann/json and is not installed.

#include <string>

#include "json.hpp"

namespace varietal {

using Json = nlohmann::ordered_json;

/// Serializes `value` like Json::dump(indent) except that floating-point
/// numbers use 17 significant digits, so output is exact and byte-stable.
std::string format_json(const Json& value, int indent = 2);

}  // namespace varietal
