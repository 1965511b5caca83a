#include "opdyn/elementary.hpp"

#include <algorithm>
#include <stdexcept>

#include "opdyn/errors.hpp"
#include "opdyn/numfmt.hpp"

namespace opdyn {

std::string to_string(Orientation o) { return o == Orientation::WFU ? "WFU" : "UFW"; }

Orientation parse_orientation(const std::string& text) {
    if (text == "WFU") return Orientation::WFU;
    if (text == "UFW") return Orientation::UFW;
    throw SchemaError("unknown orientation '" + text + "' (expected WFU or UFW)");
}

FiniteMatrix apply_power(const ElementaryOp& t, std::int64_t p, const FiniteMatrix& f, const Limits& limits) {
    if (p == 0) return f;
    const ShiftProduct w_power{{t.shift(), p}};
    if (t.orientation() == Orientation::WFU) {
        return left_multiply(w_power, right_multiply(f, t.unitary(), p, limits), limits);
    }
    return left_multiply(t.unitary(), p, right_multiply(f, w_power, limits), limits);
}

namespace {

void check_members(std::span<const OrbitMember> members, std::int64_t n_max, const Limits& limits) {
    if (members.empty()) throw std::invalid_argument("orbit needs at least one operator");
    if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
    const Orientation o = members.front().op.orientation();
    for (const auto& m : members) {
        if (m.op.orientation() != o) throw std::invalid_argument("orbit members mix WFU and UFW orientations");
        if (m.exponent <= 0) throw std::invalid_argument("orbit exponents must be positive");
        if (n_max > 0 && m.exponent > limits.horizon / n_max) {
            throw HorizonError("orbit power " + std::to_string(m.exponent) + "*" + std::to_string(n_max) +
                               " exceeds horizon " + std::to_string(limits.horizon));
        }
    }
}

}  // namespace

void orbit(std::span<const OrbitMember> members, const FiniteMatrix& f, std::int64_t n_max,
           const std::function<void(const OrbitRow&)>& sink, const Limits& limits) {
    check_members(members, n_max, limits);
    for (std::int64_t n = 0; n <= n_max; ++n) {
        for (std::size_t l = 0; l < members.size(); ++l) {
            sink(OrbitRow{n, l + 1, apply_power(members[l].op, members[l].exponent * n, f, limits)});
        }
    }
}

std::vector<DistanceRow> orbit_distance_trace(std::span<const OrbitMember> members, const FiniteMatrix& f,
                                              std::span<const FiniteMatrix> targets, std::int64_t n_max,
                                              const Limits& limits, const NormOptions& norm) {
    if (targets.size() != members.size()) {
        throw std::invalid_argument("orbit_distance_trace needs one target per operator");
    }
    std::vector<DistanceRow> rows;
    orbit(
        members, f, n_max,
        [&](const OrbitRow& row) {
            rows.push_back({row.n, row.l, op_norm(row.value - targets[row.l - 1], norm)});
        },
        limits);
    return rows;
}

std::string orbit_csv(std::span<const DistanceRow> rows) {
    std::string out = "n,l,norm_distance\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n) + "," + std::to_string(r.l) + "," + format_sci17(r.distance) + "\n";
    }
    return out;
}

}  // namespace opdyn
