#pragma once

// Structured operators on the Z-indexed orthonormal basis {e_j}: bilateral
// weighted shifts, permutation unitaries and exact weight-product arithmetic
// in the natural-log domain.

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace opdyn {

using Index = std::int64_t;

/// Bounds on how far a computation may transport indices.
struct Limits {
    std::int64_t horizon = 10'000;    ///< max |power| of any single shift or unitary factor
    Index window_cap = 1'000'000;     ///< max |index| a transported entry may reach
};

/// Positive weight attached to each basis index.
class WeightRule {
public:
    /// neg for j < split, nonneg for j >= split.
    static WeightRule piecewise(double neg, double nonneg, Index split = 0);
    /// table[j] where present, fallback elsewhere.
    static WeightRule table(std::map<Index, double> entries, double fallback);
    static WeightRule constant(double w) { return piecewise(w, w); }

    double operator()(Index j) const;

    /// Sum of log-weights over the inclusive range [lo, hi]; 0 when hi < lo.
    double log_sum(Index lo, Index hi) const;
    /// Product of weights over [lo, hi]; may overflow to inf, callers check.
    double product(Index lo, Index hi) const;

    /// The rule j -> (*this)(j - offset).
    WeightRule shifted(Index offset) const;

    bool operator==(const WeightRule&) const = default;

    struct Piecewise {
        double neg;
        double nonneg;
        Index split;
        bool operator==(const Piecewise&) const = default;
    };
    struct Table {
        std::map<Index, double> entries;
        double fallback;
        bool operator==(const Table&) const = default;
    };
    const std::variant<Piecewise, Table>& kind() const { return kind_; }

private:
    explicit WeightRule(std::variant<Piecewise, Table> k) : kind_(std::move(k)) {}
    std::variant<Piecewise, Table> kind_;
};

/// coeff * e_index with coeff = sign * exp(log_coeff).
struct MonomialVector {
    Index index = 0;
    double log_coeff = 0.0;
    int sign = 1;

    double value() const;
};

/// Bilateral weighted shift e_j -> rule(j) e_{j+step}, step = +1 or -1.
///
/// The forward shift (step +1) is the usual object; step -1 appears as the
/// adjoint of a forward shift, W* e_j = rule(j-1) e_{j-1}.
class WeightedShift {
public:
    explicit WeightedShift(WeightRule rule, int step = 1);

    const WeightRule& rule() const { return rule_; }
    int step() const { return step_; }

    /// W^n e_j as an exact log-domain monomial. Throws HorizonError if |n| > horizon.
    MonomialVector apply_power(std::int64_t n, Index j, std::int64_t horizon) const;
    /// Linear coefficient c of W^n e_j = c e_{j + step*n}, accumulated as a
    /// direct product so that powers of exactly representable weights stay exact.
    double power_coefficient(std::int64_t n, Index j, std::int64_t horizon) const;

    WeightedShift adjoint() const;

    bool operator==(const WeightedShift&) const = default;

private:
    // Inclusive range of indices whose weights enter W^n e_j, and whether they divide.
    struct Path {
        Index lo;
        Index hi;
        bool inverse;
    };
    Path path(std::int64_t n, Index j) const;

    WeightRule rule_;
    int step_;
};

/// Unitary e_j -> e_{pi(j)} for a bijection pi of Z.
class PermutationUnitary {
public:
    /// pi(j) = j + t, t != 0.
    static PermutationUnitary translation(Index t);
    /// pi(lo + i) = images[i] on the declared window [lo, lo + images.size() - 1].
    /// escape_horizon > 0 caps the powers for which escape certification is attempted.
    static PermutationUnitary table(Index lo, std::vector<Index> images, std::int64_t escape_horizon = 0);

    bool is_translation() const { return !table_.has_value(); }
    Index translation_step() const { return step_; }
    Index window_lo() const;
    Index window_hi() const;
    std::int64_t escape_horizon() const;

    /// pi^n(j). Table kind throws WindowError when an iterate must be taken
    /// outside the declared window.
    Index apply_power(std::int64_t n, Index j) const;

    bool operator==(const PermutationUnitary&) const = default;

private:
    struct Table {
        Index lo;
        std::vector<Index> images;
        std::map<Index, Index> inverse;
        std::int64_t escape_horizon;
        bool operator==(const Table&) const = default;
    };

    PermutationUnitary() = default;
    Index step_ = 0;
    std::optional<Table> table_;
};

/// One factor W^power of an ordered shift product.
struct ShiftFactor {
    WeightedShift shift;
    std::int64_t power;
};

/// Product factors[0] * factors[1] * ... ; the last factor acts first.
using ShiftProduct = std::vector<ShiftFactor>;

/// Operator norm of (product) * P_m, attained on basis vector e_argmax.
struct ProductNorm {
    double log_value;
    double value;
    Index argmax;
};

MonomialVector shift_power_apply(const WeightedShift& w, std::int64_t n, Index j, const Limits& limits = {});
Index unitary_power_apply(const PermutationUnitary& u, std::int64_t n, Index j);

/// (product) e_j in log domain.
MonomialVector apply_product(const ShiftProduct& product, Index j, const Limits& limits = {});
/// Linear coefficient of (product) e_j; throws WindowError if it is not finite.
double product_coefficient(const ShiftProduct& product, Index j, const Limits& limits = {});
/// Index reached by (product) e_j.
Index product_target(const ShiftProduct& product, Index j);

/// Least N <= horizon with pi^n([-m, m]) disjoint from [-m, m] for every
/// N <= n <= horizon. Certification is limited to the horizon; std::nullopt
/// when no such N exists or a table iterate leaves its window.
std::optional<std::int64_t> escape_index(const PermutationUnitary& u, std::int64_t m, std::int64_t horizon);

/// Exact ||(product) P_m||: the product maps distinct basis vectors to
/// multiples of distinct basis vectors, so the norm is the largest column
/// coefficient. Ties resolve to the smallest index.
ProductNorm monomial_product_norm(const ShiftProduct& product, std::int64_t m, const Limits& limits = {});

}  // namespace opdyn
