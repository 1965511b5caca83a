#pragma once

#include <string>
#include <string_view>

namespace opdyn {

/// Shortest decimal text that parses back to the identical double.
std::string format_shortest(double v);

/// 17 significant digits, lowercase scientific notation ("1.2500000000000000e-01").
std::string format_sci17(double v);

/// Locale-independent parse of a full token; accepts "a/b" fractions.
/// Throws SchemaError on malformed input.
double parse_double(std::string_view text);

}  // namespace opdyn
