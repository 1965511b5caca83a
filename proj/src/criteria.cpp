#include "opdyn/criteria.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "opdyn/errors.hpp"

namespace opdyn {

NSequence NSequence::all() { return NSequence{}; }

NSequence NSequence::arithmetic(std::int64_t first, std::int64_t step) {
    NSequence s;
    s.kind_ = Kind::Arithmetic;
    s.first_ = first;
    s.step_ = step;
    return s;
}

NSequence NSequence::list(std::vector<std::int64_t> values) {
    NSequence s;
    s.kind_ = Kind::List;
    s.values_ = std::move(values);
    return s;
}

std::int64_t NSequence::at(std::int64_t k) const {
    if (k < 1) throw std::out_of_range("n_k is indexed from k = 1");
    switch (kind_) {
        case Kind::All:
            return k;
        case Kind::Arithmetic:
            return first_ + step_ * (k - 1);
        case Kind::List:
            if (k > static_cast<std::int64_t>(values_.size())) {
                throw std::out_of_range("n_k requested beyond the explicit list");
            }
            return values_[static_cast<std::size_t>(k - 1)];
    }
    return k;
}

std::optional<std::int64_t> NSequence::length() const {
    if (kind_ == Kind::List) return static_cast<std::int64_t>(values_.size());
    return std::nullopt;
}

std::vector<std::string> NSequence::diagnostics() const {
    std::vector<std::string> out;
    if (kind_ == Kind::Arithmetic) {
        if (first_ < 1) out.emplace_back("n_seq first term must be positive");
        if (step_ < 1) out.emplace_back("n_seq not strictly increasing");
    } else if (kind_ == Kind::List) {
        if (values_.empty()) out.emplace_back("n_seq list is empty");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (values_[i] < 1) {
                out.emplace_back("n_seq terms must be positive");
                break;
            }
        }
        for (std::size_t i = 1; i < values_.size(); ++i) {
            if (values_[i] <= values_[i - 1]) {
                out.emplace_back("n_seq not strictly increasing");
                break;
            }
        }
    }
    return out;
}

ElementaryOp CriterionInstance::op(std::size_t l) const {
    return ElementaryOp(unitary, shifts.at(l - 1), orientation);
}

std::vector<std::int64_t> CriterionInstance::n_values() const {
    std::int64_t count = k_max;
    if (auto len = n_seq.length()) count = std::min(count, *len);
    std::vector<std::int64_t> out;
    for (std::int64_t k = 1; k <= count; ++k) out.push_back(n_seq.at(k));
    return out;
}

std::vector<std::string> CriterionInstance::diagnostics(bool require_pair) const {
    std::vector<std::string> out;
    if (shifts.empty()) out.emplace_back("at least one weighted shift is required");
    if (require_pair && shifts.size() == 1) out.emplace_back("disjointness needs N >= 2 operators");
    if (r.size() != shifts.size()) out.emplace_back("r must list one exponent per weighted shift");
    if (!r.empty() && r.front() < 1) out.emplace_back("r exponents must be positive");
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (r[i] <= r[i - 1]) {
            out.emplace_back("r not strictly increasing");
            break;
        }
    }
    for (auto& d : n_seq.diagnostics()) out.push_back(std::move(d));
    if (m < 0) out.emplace_back("m must be nonnegative");
    if (k_max < 1) out.emplace_back("k_max must be at least 1");
    if (limits.horizon < 1) out.emplace_back("horizon must be at least 1");
    if (limits.window_cap < m) out.emplace_back("window cap must be at least m");
    return out;
}

void CriterionInstance::validate(bool require_pair) const {
    const auto d = diagnostics(require_pair);
    if (d.empty()) return;
    std::string msg = "invalid criterion instance:";
    for (const auto& s : d) msg += " " + s + ";";
    throw SchemaError(msg);
}

std::string label_forward(std::size_t l, const std::string& tail) {
    const auto ls = std::to_string(l);
    return "W" + ls + "^{+r" + ls + "*n}" + tail;
}

std::string label_backward(std::size_t l, const std::string& tail) {
    const auto ls = std::to_string(l);
    return "W" + ls + "^{-r" + ls + "*n}" + tail;
}

std::string label_cross(std::size_t l, std::size_t s, const std::string& tail) {
    const auto ls = std::to_string(l);
    const auto ss = std::to_string(s);
    return "W" + ls + "^{+r" + ls + "*n}W" + ss + "^{-r" + ss + "*n}" + tail;
}

std::string label_cross_right(std::size_t l, std::size_t s, const std::string& head) {
    const auto ls = std::to_string(l);
    const auto ss = std::to_string(s);
    return head + "W" + ss + "^{-r" + ss + "*n}W" + ls + "^{+r" + ls + "*n}";
}

ShiftProduct adjoint_product(const ShiftProduct& product) {
    ShiftProduct out;
    for (auto it = product.rbegin(); it != product.rend(); ++it) out.push_back({it->shift.adjoint(), it->power});
    return out;
}

namespace {

// The corollary shift products for one n, in report order.
struct CorollaryQuantity {
    std::string label;
    std::function<ShiftProduct(std::int64_t n)> product;
};

std::vector<CorollaryQuantity> corollary_quantities(const CriterionInstance& inst) {
    std::vector<CorollaryQuantity> q;
    const std::size_t N = inst.size();
    for (std::size_t l = 1; l <= N; ++l) {
        const WeightedShift& w = inst.shifts[l - 1];
        const std::int64_t r = inst.r[l - 1];
        q.push_back({label_forward(l), [w, r](std::int64_t n) { return ShiftProduct{{w, r * n}}; }});
        q.push_back({label_backward(l), [w, r](std::int64_t n) { return ShiftProduct{{w, -r * n}}; }});
    }
    for (std::size_t l = 1; l <= N; ++l) {
        for (std::size_t s = 1; s <= N; ++s) {
            if (s == l) continue;
            const WeightedShift& wl = inst.shifts[l - 1];
            const WeightedShift& ws = inst.shifts[s - 1];
            const std::int64_t rl = inst.r[l - 1];
            const std::int64_t rs = inst.r[s - 1];
            q.push_back({label_cross(l, s), [wl, ws, rl, rs](std::int64_t n) {
                             return ShiftProduct{{wl, rl * n}, {ws, -rs * n}};
                         }});
        }
    }
    return q;
}

}  // namespace

std::vector<DecayReport> check_corollary_sufficient(const CriterionInstance& inst, double tol) {
    inst.validate();
    const auto ns = inst.n_values();
    std::vector<DecayReport> reports;
    for (const auto& q : corollary_quantities(inst)) {
        std::vector<DecaySample> samples;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const auto norm = monomial_product_norm(q.product(ns[i]), inst.m, inst.limits);
            samples.push_back(log_sample(static_cast<std::int64_t>(i + 1), ns[i], norm.log_value));
        }
        reports.push_back(make_report(q.label, std::move(samples), tol));
    }
    return reports;
}

std::vector<DecayReport> check_theorem_conditions(const CriterionInstance& inst,
                                                  std::span<const FiniteMatrix> d_seq,
                                                  std::span<const std::vector<FiniteMatrix>> g_seqs,
                                                  double tol, const NormOptions& norm) {
    inst.validate(false);
    const auto ns = inst.n_values();
    const std::size_t K = ns.size();
    const std::size_t N = inst.size();
    if (d_seq.size() < K || g_seqs.size() != N) {
        throw std::invalid_argument("witness sequences must cover k = 1..k_max for every operator");
    }
    for (const auto& g : g_seqs) {
        if (g.size() < K) throw std::invalid_argument("witness sequences must cover k = 1..k_max");
    }
    const FiniteMatrix pm = FiniteMatrix::projection(inst.m);

    auto series = [&](const std::string& label, const auto& value_at) {
        std::vector<DecaySample> samples;
        for (std::size_t i = 0; i < K; ++i) {
            samples.push_back(linear_sample(static_cast<std::int64_t>(i + 1), ns[i], value_at(i)));
        }
        return make_report(label, std::move(samples), tol);
    };

    std::vector<DecayReport> reports;
    reports.push_back(series("D_k-P_m", [&](std::size_t i) { return op_norm(d_seq[i] - pm, norm); }));
    for (std::size_t l = 1; l <= N; ++l) {
        reports.push_back(series("G" + std::to_string(l) + "_k-P_m",
                                 [&](std::size_t i) { return op_norm(g_seqs[l - 1][i] - pm, norm); }));
    }
    // WFU: shift powers act on the left of the witnesses. UFW: on the right,
    // with cross products W_s^{-r_s n} W_l^{r_l n}.
    const bool wfu = inst.orientation == Orientation::WFU;
    auto act = [&](const ShiftProduct& prod, const FiniteMatrix& a) {
        return wfu ? left_multiply(prod, a, inst.limits) : right_multiply(a, prod, inst.limits);
    };
    for (std::size_t l = 1; l <= N; ++l) {
        const WeightedShift& w = inst.shifts[l - 1];
        const std::int64_t r = inst.r[l - 1];
        const std::string label = wfu ? label_forward(l, "D_k") : "D_k" + label_forward(l, "");
        reports.push_back(series(label, [&](std::size_t i) {
            return op_norm(act({{w, r * ns[i]}}, d_seq[i]), norm);
        }));
    }
    for (std::size_t l = 1; l <= N; ++l) {
        const WeightedShift& w = inst.shifts[l - 1];
        const std::int64_t r = inst.r[l - 1];
        const std::string g = "G" + std::to_string(l) + "_k";
        const std::string label = wfu ? label_backward(l, g) : g + label_backward(l, "");
        reports.push_back(series(label, [&](std::size_t i) {
            return op_norm(act({{w, -r * ns[i]}}, g_seqs[l - 1][i]), norm);
        }));
    }
    for (std::size_t l = 1; l <= N; ++l) {
        for (std::size_t s = 1; s <= N; ++s) {
            if (s == l) continue;
            const WeightedShift& wl = inst.shifts[l - 1];
            const WeightedShift& ws = inst.shifts[s - 1];
            const std::int64_t rl = inst.r[l - 1];
            const std::int64_t rs = inst.r[s - 1];
            const std::string g = "G" + std::to_string(s) + "_k";
            const std::string label = wfu ? label_cross(l, s, g) : g + label_cross_right(l, s);
            reports.push_back(series(label, [&](std::size_t i) {
                const ShiftProduct prod = wfu ? ShiftProduct{{wl, rl * ns[i]}, {ws, -rs * ns[i]}}
                                              : ShiftProduct{{ws, -rs * ns[i]}, {wl, rl * ns[i]}};
                return op_norm(act(prod, g_seqs[s - 1][i]), norm);
            }));
        }
    }
    return reports;
}

std::vector<DecayReport> check_dhc_criterion_pointwise(const CriterionInstance& inst,
                                                       std::span<const FiniteMatrix> seeds, double tol,
                                                       const NormOptions& norm) {
    inst.validate();
    if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
    const auto ns = inst.n_values();
    const std::size_t N = inst.size();
    std::vector<DecayReport> reports;

    // Seeds are P_m F (WFU) or F P_m (UFW); in UFW the bounds are the
    // right-sided norms ||P_m X|| = ||X^* P_m||.
    const bool wfu = inst.orientation == Orientation::WFU;
    const std::string cut = wfu ? "(P_mF)" : "(FP_m)";
    for (std::size_t seed = 0; seed < seeds.size(); ++seed) {
        const FiniteMatrix g = wfu ? truncate_left(seeds[seed], inst.m) : truncate_right(seeds[seed], inst.m);
        const double f_norm = op_norm(seeds[seed], norm);
        const std::string prefix = "seed" + std::to_string(seed + 1) + ":";

        auto series = [&](const std::string& label, const auto& value_at, const auto& product_at) {
            std::vector<DecaySample> samples;
            for (std::size_t i = 0; i < ns.size(); ++i) {
                DecaySample s = linear_sample(static_cast<std::int64_t>(i + 1), ns[i], value_at(ns[i]));
                const ShiftProduct prod = product_at(ns[i]);
                const double bound =
                    monomial_product_norm(wfu ? prod : adjoint_product(prod), inst.m, inst.limits).value * f_norm;
                s.bound = bound;
                s.bound_ok = s.value <= bound * (1.0 + 1e-10) + 1e-8;
                samples.push_back(s);
            }
            return make_report(prefix + label, std::move(samples), tol);
        };

        for (std::size_t l = 1; l <= N; ++l) {
            const ElementaryOp t = inst.op(l);
            const WeightedShift& w = inst.shifts[l - 1];
            const std::int64_t r = inst.r[l - 1];
            const auto ls = std::to_string(l);
            reports.push_back(series(
                "T" + ls + "^{+r" + ls + "*n}" + cut,
                [&](std::int64_t n) { return op_norm(apply_power(t, r * n, g, inst.limits), norm); },
                [&](std::int64_t n) { return ShiftProduct{{w, r * n}}; }));
            reports.push_back(series(
                "T" + ls + "^{-r" + ls + "*n}" + cut,
                [&](std::int64_t n) { return op_norm(apply_power(t, -r * n, g, inst.limits), norm); },
                [&](std::int64_t n) { return ShiftProduct{{w, -r * n}}; }));
        }
        for (std::size_t l = 1; l <= N; ++l) {
            for (std::size_t s = 1; s <= N; ++s) {
                if (s == l) continue;
                const ElementaryOp tl = inst.op(l);
                const ElementaryOp ts = inst.op(s);
                const WeightedShift& wl = inst.shifts[l - 1];
                const WeightedShift& ws = inst.shifts[s - 1];
                const std::int64_t rl = inst.r[l - 1];
                const std::int64_t rs = inst.r[s - 1];
                const auto ls = std::to_string(l);
                const auto ss = std::to_string(s);
                reports.push_back(series(
                    "T" + ls + "^{+r" + ls + "*n}T" + ss + "^{-r" + ss + "*n}" + cut,
                    [&](std::int64_t n) {
                        const FiniteMatrix inner = apply_power(ts, -rs * n, g, inst.limits);
                        return op_norm(apply_power(tl, rl * n, inner, inst.limits), norm);
                    },
                    [&](std::int64_t n) {
                        return wfu ? ShiftProduct{{wl, rl * n}, {ws, -rs * n}} : ShiftProduct{{ws, -rs * n}, {wl, rl * n}};
                    }));
            }
        }
    }
    return reports;
}

std::optional<std::vector<std::int64_t>> search_subsequence(const CriterionInstance& inst, std::int64_t pool_lo,
                                                            std::int64_t pool_hi, std::size_t target_count,
                                                            double tol) {
    CriterionInstance probe = inst;
    probe.n_seq = NSequence::all();
    probe.validate();
    if (pool_lo < 1 || pool_hi < pool_lo) throw std::invalid_argument("candidate pool must be a nonempty range in N");
    const auto quantities = corollary_quantities(probe);
    std::vector<std::int64_t> chosen;
    for (std::int64_t n = pool_lo; n <= pool_hi && chosen.size() < target_count; ++n) {
        const auto k = static_cast<double>(chosen.size() + 1);
        const double log_threshold = std::log(tol) - k * std::log(2.0);
        bool ok = true;
        for (const auto& q : quantities) {
            if (!(monomial_product_norm(q.product(n), probe.m, probe.limits).log_value < log_threshold)) {
                ok = false;
                break;
            }
        }
        if (ok) chosen.push_back(n);
    }
    if (chosen.size() < target_count) return std::nullopt;
    return chosen;
}

}  // namespace opdyn
