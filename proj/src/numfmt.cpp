#include "opdyn/numfmt.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "opdyn/errors.hpp"

namespace opdyn {

std::string format_shortest(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

std::string format_sci17(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 16);
    return std::string(buf.data(), end);
}

namespace {

double parse_plain(std::string_view text, std::string_view whole) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw SchemaError("malformed number '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

double parse_double(std::string_view text) {
    const auto slash = text.find('/');
    double v = 0.0;
    if (slash == std::string_view::npos) {
        v = parse_plain(text, text);
    } else {
        const double num = parse_plain(text.substr(0, slash), text);
        const double den = parse_plain(text.substr(slash + 1), text);
        if (den == 0.0) throw SchemaError("zero denominator in '" + std::string(text) + "'");
        v = num / den;
    }
    if (!std::isfinite(v)) throw SchemaError("non-finite number '" + std::string(text) + "'");
    return v;
}

}  // namespace opdyn
