#pragma once

// Elementary operators F -> W F U (and the mirrored F -> U F W) acting on
// finite-rank matrices, with integer powers and joint orbits.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "opdyn/lattice.hpp"
#include "opdyn/opspace.hpp"

namespace opdyn {

enum class Orientation { WFU, UFW };

std::string to_string(Orientation o);
Orientation parse_orientation(const std::string& text);

/// T(F) = W F U (Orientation::WFU) or U F W (Orientation::UFW); the inverse
/// S = T^{-1} is apply_power with a negative exponent.
class ElementaryOp {
public:
    ElementaryOp(PermutationUnitary u, WeightedShift w, Orientation o = Orientation::WFU)
        : u_(std::move(u)), w_(std::move(w)), orientation_(o) {}

    const PermutationUnitary& unitary() const { return u_; }
    const WeightedShift& shift() const { return w_; }
    Orientation orientation() const { return orientation_; }

private:
    PermutationUnitary u_;
    WeightedShift w_;
    Orientation orientation_;
};

/// T^p(F) by entry transport: W^p F U^p or U^p F W^p.
FiniteMatrix apply_power(const ElementaryOp& t, std::int64_t p, const FiniteMatrix& f, const Limits& limits = {});

/// One operator of a joint orbit together with its exponent r_l.
struct OrbitMember {
    ElementaryOp op;
    std::int64_t exponent;
};

struct OrbitRow {
    std::int64_t n;
    std::size_t l;  ///< 1-based member index
    FiniteMatrix value;
};

/// Streams T_l^{r_l n}(F) for n = 0..n_max, l = 1..N in (n, l) order.
/// All members must share one orientation.
void orbit(std::span<const OrbitMember> members, const FiniteMatrix& f, std::int64_t n_max,
           const std::function<void(const OrbitRow&)>& sink, const Limits& limits = {});

struct DistanceRow {
    std::int64_t n;
    std::size_t l;
    double distance;
};

/// ||T_l^{r_l n}(F) - targets[l]|| along the joint orbit.
std::vector<DistanceRow> orbit_distance_trace(std::span<const OrbitMember> members, const FiniteMatrix& f,
                                              std::span<const FiniteMatrix> targets, std::int64_t n_max,
                                              const Limits& limits = {}, const NormOptions& norm = {});

/// "n,l,norm_distance" CSV with 17 significant digits.
std::string orbit_csv(std::span<const DistanceRow> rows);

}  // namespace opdyn
