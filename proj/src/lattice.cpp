#include "opdyn/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "opdyn/errors.hpp"

namespace opdyn {

namespace {

void require_weight(double w) {
    if (!std::isfinite(w) || w <= 0.0) {
        throw std::invalid_argument("weights must be finite and strictly positive, got " + std::to_string(w));
    }
}

void require_horizon(std::int64_t n, std::int64_t horizon) {
    if (n > horizon || -n > horizon) {
        throw HorizonError("power " + std::to_string(n) + " exceeds horizon " + std::to_string(horizon));
    }
}

// Number of indices in [lo, hi] strictly below split.
Index count_below(Index lo, Index hi, Index split) {
    if (hi < lo) return 0;
    return std::max<Index>(0, std::min(hi, split - 1) - lo + 1);
}

}  // namespace

WeightRule WeightRule::piecewise(double neg, double nonneg, Index split) {
    require_weight(neg);
    require_weight(nonneg);
    return WeightRule(Piecewise{neg, nonneg, split});
}

WeightRule WeightRule::table(std::map<Index, double> entries, double fallback) {
    require_weight(fallback);
    for (const auto& [j, w] : entries) require_weight(w);
    return WeightRule(Table{std::move(entries), fallback});
}

double WeightRule::operator()(Index j) const {
    if (const auto* p = std::get_if<Piecewise>(&kind_)) {
        return j < p->split ? p->neg : p->nonneg;
    }
    const auto& t = std::get<Table>(kind_);
    auto it = t.entries.find(j);
    return it == t.entries.end() ? t.fallback : it->second;
}

double WeightRule::log_sum(Index lo, Index hi) const {
    if (hi < lo) return 0.0;
    const Index len = hi - lo + 1;
    if (const auto* p = std::get_if<Piecewise>(&kind_)) {
        const Index below = count_below(lo, hi, p->split);
        return static_cast<double>(below) * std::log(p->neg) +
               static_cast<double>(len - below) * std::log(p->nonneg);
    }
    const auto& t = std::get<Table>(kind_);
    double sum = 0.0;
    Index listed = 0;
    for (auto it = t.entries.lower_bound(lo); it != t.entries.end() && it->first <= hi; ++it) {
        sum += std::log(it->second);
        ++listed;
    }
    return sum + static_cast<double>(len - listed) * std::log(t.fallback);
}

double WeightRule::product(Index lo, Index hi) const {
    if (hi < lo) return 1.0;
    const Index len = hi - lo + 1;
    if (const auto* p = std::get_if<Piecewise>(&kind_)) {
        const Index below = count_below(lo, hi, p->split);
        return std::pow(p->neg, static_cast<double>(below)) *
               std::pow(p->nonneg, static_cast<double>(len - below));
    }
    const auto& t = std::get<Table>(kind_);
    double prod = 1.0;
    Index listed = 0;
    for (auto it = t.entries.lower_bound(lo); it != t.entries.end() && it->first <= hi; ++it) {
        prod *= it->second;
        ++listed;
    }
    return prod * std::pow(t.fallback, static_cast<double>(len - listed));
}

WeightRule WeightRule::shifted(Index offset) const {
    if (const auto* p = std::get_if<Piecewise>(&kind_)) {
        return WeightRule(Piecewise{p->neg, p->nonneg, p->split + offset});
    }
    const auto& t = std::get<Table>(kind_);
    std::map<Index, double> moved;
    for (const auto& [j, w] : t.entries) moved.emplace(j + offset, w);
    return WeightRule(Table{std::move(moved), t.fallback});
}

double MonomialVector::value() const { return sign * std::exp(log_coeff); }

WeightedShift::WeightedShift(WeightRule rule, int step) : rule_(std::move(rule)), step_(step) {
    if (step != 1 && step != -1) throw std::invalid_argument("shift step must be +1 or -1");
}

WeightedShift::Path WeightedShift::path(std::int64_t n, Index j) const {
    if (n == 0) return {1, 0, false};
    if (n > 0) {
        // weights at j, j+step, ..., j+step*(n-1)
        return step_ > 0 ? Path{j, j + n - 1, false} : Path{j - n + 1, j, false};
    }
    // W^{-1} e_j = e_{j-step} / rule(j-step)
    const std::int64_t k = -n;
    return step_ > 0 ? Path{j - k, j - 1, true} : Path{j + 1, j + k, true};
}

MonomialVector WeightedShift::apply_power(std::int64_t n, Index j, std::int64_t horizon) const {
    require_horizon(n, horizon);
    const Path p = path(n, j);
    const double s = rule_.log_sum(p.lo, p.hi);
    return {j + step_ * n, p.inverse ? -s : s, 1};
}

double WeightedShift::power_coefficient(std::int64_t n, Index j, std::int64_t horizon) const {
    require_horizon(n, horizon);
    const Path p = path(n, j);
    const double prod = rule_.product(p.lo, p.hi);
    if (!std::isfinite(prod) || prod <= 0.0) {
        throw WindowError("weight product for power " + std::to_string(n) + " at e_" + std::to_string(j) +
                          " leaves the double range");
    }
    return p.inverse ? 1.0 / prod : prod;
}

WeightedShift WeightedShift::adjoint() const {
    // W* e_j = rule(j - step) e_{j - step}
    return WeightedShift(rule_.shifted(step_), -step_);
}

PermutationUnitary PermutationUnitary::translation(Index t) {
    if (t == 0) throw std::invalid_argument("translation step must be nonzero");
    PermutationUnitary u;
    u.step_ = t;
    return u;
}

PermutationUnitary PermutationUnitary::table(Index lo, std::vector<Index> images, std::int64_t escape_horizon) {
    if (images.empty()) throw std::invalid_argument("permutation table must be nonempty");
    if (escape_horizon < 0) throw std::invalid_argument("escape horizon must be nonnegative");
    std::map<Index, Index> inverse;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const Index source = lo + static_cast<Index>(i);
        if (!inverse.emplace(images[i], source).second) {
            throw std::invalid_argument("permutation table is not injective at image " + std::to_string(images[i]));
        }
    }
    PermutationUnitary u;
    u.table_ = Table{lo, std::move(images), std::move(inverse), escape_horizon};
    return u;
}

Index PermutationUnitary::window_lo() const { return table_ ? table_->lo : 0; }

Index PermutationUnitary::window_hi() const {
    return table_ ? table_->lo + static_cast<Index>(table_->images.size()) - 1 : -1;
}

std::int64_t PermutationUnitary::escape_horizon() const { return table_ ? table_->escape_horizon : 0; }

Index PermutationUnitary::apply_power(std::int64_t n, Index j) const {
    if (!table_) return j + n * step_;
    const Index lo = window_lo();
    const Index hi = window_hi();
    for (std::int64_t i = 0; i < n; ++i) {
        if (j < lo || j > hi) {
            throw WindowError("permutation iterate e_" + std::to_string(j) + " left the declared window [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        j = table_->images[static_cast<std::size_t>(j - lo)];
    }
    for (std::int64_t i = 0; i > n; --i) {
        auto it = table_->inverse.find(j);
        if (it == table_->inverse.end()) {
            throw WindowError("inverse permutation undefined at e_" + std::to_string(j) +
                              " within the declared window");
        }
        j = it->second;
    }
    return j;
}

MonomialVector shift_power_apply(const WeightedShift& w, std::int64_t n, Index j, const Limits& limits) {
    return w.apply_power(n, j, limits.horizon);
}

Index unitary_power_apply(const PermutationUnitary& u, std::int64_t n, Index j) { return u.apply_power(n, j); }

MonomialVector apply_product(const ShiftProduct& product, Index j, const Limits& limits) {
    MonomialVector acc{j, 0.0, 1};
    for (auto it = product.rbegin(); it != product.rend(); ++it) {
        const MonomialVector step = it->shift.apply_power(it->power, acc.index, limits.horizon);
        acc.index = step.index;
        acc.log_coeff += step.log_coeff;
        acc.sign *= step.sign;
    }
    return acc;
}

double product_coefficient(const ShiftProduct& product, Index j, const Limits& limits) {
    double c = 1.0;
    for (auto it = product.rbegin(); it != product.rend(); ++it) {
        c *= it->shift.power_coefficient(it->power, j, limits.horizon);
        j += it->shift.step() * it->power;
    }
    if (!std::isfinite(c)) throw WindowError("shift product coefficient leaves the double range");
    return c;
}

Index product_target(const ShiftProduct& product, Index j) {
    for (const auto& f : product) j += f.shift.step() * f.power;
    return j;
}

std::optional<std::int64_t> escape_index(const PermutationUnitary& u, std::int64_t m, std::int64_t horizon) {
    if (horizon < 1) throw std::invalid_argument("escape horizon must be at least 1");
    if (m < 0) throw std::invalid_argument("window radius must be nonnegative");
    if (u.is_translation()) {
        // pi^n([-m, m]) = [-m + n t, m + n t], disjoint iff |n t| > 2m
        const Index t = u.translation_step() < 0 ? -u.translation_step() : u.translation_step();
        std::int64_t last_hit = 0;
        for (std::int64_t n = 1; n <= horizon; ++n) {
            if (n * t <= 2 * m) last_hit = n;
        }
        if (last_hit == horizon) return std::nullopt;
        return last_hit + 1;
    }

    const std::int64_t limit = u.escape_horizon() > 0 ? std::min(horizon, u.escape_horizon()) : horizon;
    std::vector<Index> points;
    for (Index j = -m; j <= m; ++j) points.push_back(j);
    std::int64_t last_hit = 0;
    for (std::int64_t n = 1; n <= limit; ++n) {
        bool hit = false;
        for (auto& p : points) {
            if (p < u.window_lo() || p > u.window_hi()) return std::nullopt;
            p = u.apply_power(1, p);
            hit = hit || (p >= -m && p <= m);
        }
        if (hit) last_hit = n;
    }
    if (last_hit == limit) return std::nullopt;
    return last_hit + 1;
}

ProductNorm monomial_product_norm(const ShiftProduct& product, std::int64_t m, const Limits& limits) {
    if (m < 0) throw std::invalid_argument("window radius must be nonnegative");
    ProductNorm best{0.0, 0.0, 0};
    bool first = true;
    for (Index j = -m; j <= m; ++j) {
        const MonomialVector v = apply_product(product, j, limits);
        if (first || v.log_coeff > best.log_value) {
            best.log_value = v.log_coeff;
            best.argmax = j;
            first = false;
        }
    }
    best.value = std::exp(best.log_value);
    return best;
}

}  // namespace opdyn
