#include "opdyn/duality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opdyn {

TestSet TestSet::defaults(std::int64_t m) {
    if (m < 0) throw std::invalid_argument("probe window must be nonnegative");
    TestSet t;
    for (std::int64_t j = 0; j <= m; ++j) t.probes.push_back(FiniteMatrix::projection(j));
    for (Index i = -m; i <= m; ++i)
        for (Index j = -m; j <= m; ++j) t.probes.push_back(FiniteMatrix::unit(i, j));
    return t;
}

double eval(const FunctionalRep& phi, const FiniteMatrix& f) {
    double sum = 0.0;
    const auto& fe = f.entries();
    for (const auto& [key, a] : phi.rep.entries()) {
        auto it = fe.find({key.second, key.first});
        if (it != fe.end()) sum += a * it->second;
    }
    return sum;
}

FunctionalRep m_d(const FunctionalRep& phi, const FiniteMatrix& d) { return {compose(phi.rep, d)}; }

FunctionalRep m_d_projection(const FunctionalRep& phi, std::int64_t m) { return {truncate_right(phi.rep, m)}; }

FunctionalRep m_d(const FunctionalRep& phi, const ShiftProduct& d, const Limits& limits) {
    return {right_multiply(phi.rep, d, limits)};
}

FunctionalRep dual_apply_power(const ElementaryOp& t, std::int64_t p, const FunctionalRep& phi,
                               const Limits& limits) {
    if (p == 0) return phi;
    const ShiftProduct w_power{{t.shift(), p}};
    // trace(A W^p F U^p) = trace(U^p A W^p F); trace(A U^p F W^p) = trace(W^p A U^p F)
    if (t.orientation() == Orientation::WFU) {
        return {left_multiply(t.unitary(), p, right_multiply(phi.rep, w_power, limits), limits)};
    }
    return {left_multiply(w_power, right_multiply(phi.rep, t.unitary(), p, limits), limits)};
}

double weak_star_distance(const FunctionalRep& phi, const FunctionalRep& psi, const TestSet& probes) {
    if (probes.probes.empty()) throw std::invalid_argument("weak-* distance needs a nonempty probe set");
    double worst = 0.0;
    for (const auto& f : probes.probes) worst = std::max(worst, std::abs(eval(phi, f) - eval(psi, f)));
    return worst;
}

FunctionalRep construct_eta(const WitnessBundle& bundle, const FunctionalRep& psi,
                            std::span<const FunctionalRep> phis, const CriterionInstance& inst, std::size_t k) {
    bundle.validate();
    if (phis.size() != inst.size() || bundle.g_seqs.size() != inst.size()) {
        throw std::invalid_argument("one functional and one G sequence per operator are required");
    }
    if (k < 1 || k > bundle.length()) throw std::out_of_range("k outside the bundle");
    const std::size_t i = k - 1;
    const std::int64_t n = bundle.m;
    FunctionalRep eta = m_d(m_d_projection(psi, n), bundle.d_seq[i]);
    for (std::size_t l = 1; l <= inst.size(); ++l) {
        const FunctionalRep moved = m_d(m_d_projection(phis[l - 1], n), bundle.g_seqs[l - 1][i]);
        eta.rep += dual_apply_power(inst.op(l), -inst.r[l - 1] * bundle.n_seq[i], moved, inst.limits).rep;
    }
    return eta;
}

double right_product_norm(std::int64_t m, const ShiftProduct& product, const Limits& limits) {
    return op_norm(right_multiply(FiniteMatrix::projection(m), product, limits));
}

double strong_residual(const FiniteMatrix& d, const FiniteMatrix& p, std::int64_t window) {
    std::map<Index, double> col_sq;
    const FiniteMatrix diff = d - p;
    const double scale = diff.max_abs();
    if (scale == 0.0) return 0.0;
    for (const auto& [key, v] : diff.entries()) {
        if (key.second < -window || key.second > window) continue;
        col_sq[key.second] += (v / scale) * (v / scale);
    }
    double worst = 0.0;
    for (const auto& [col, sq] : col_sq) worst = std::max(worst, std::sqrt(sq));
    return worst * scale;
}

std::vector<DecayReport> check_dual_corollary(const CriterionInstance& inst, double tol) {
    inst.validate();
    const auto ns = inst.n_values();
    const std::size_t N = inst.size();

    auto series = [&](const std::string& label, const auto& product_at, const auto& adjoint_at) {
        std::vector<DecaySample> samples;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            DecaySample s = linear_sample(static_cast<std::int64_t>(i + 1), ns[i],
                                          right_product_norm(inst.m, product_at(ns[i]), inst.limits));
            const ProductNorm primal = monomial_product_norm(adjoint_at(ns[i]), inst.m, inst.limits);
            s.bound = primal.value;
            s.bound_ok = std::abs(s.log_value - primal.log_value) <= 1e-10 * std::max(1.0, std::abs(primal.log_value));
            samples.push_back(s);
        }
        return make_report(label, std::move(samples), tol);
    };

    std::vector<DecayReport> reports;
    for (std::size_t l = 1; l <= N; ++l) {
        const WeightedShift w = inst.shifts[l - 1];
        const WeightedShift wa = w.adjoint();
        const std::int64_t r = inst.r[l - 1];
        const auto ls = std::to_string(l);
        reports.push_back(series(
            "P_mW" + ls + "^{+r" + ls + "*n}", [&](std::int64_t n) { return ShiftProduct{{w, r * n}}; },
            [&](std::int64_t n) { return ShiftProduct{{wa, r * n}}; }));
        reports.push_back(series(
            "P_mW" + ls + "^{-r" + ls + "*n}", [&](std::int64_t n) { return ShiftProduct{{w, -r * n}}; },
            [&](std::int64_t n) { return ShiftProduct{{wa, -r * n}}; }));
    }
    for (std::size_t l = 1; l <= N; ++l) {
        for (std::size_t s = 1; s <= N; ++s) {
            if (s == l) continue;
            const WeightedShift wl = inst.shifts[l - 1];
            const WeightedShift ws = inst.shifts[s - 1];
            const WeightedShift wla = wl.adjoint();
            const WeightedShift wsa = ws.adjoint();
            const std::int64_t rl = inst.r[l - 1];
            const std::int64_t rs = inst.r[s - 1];
            const auto ls = std::to_string(l);
            const auto ss = std::to_string(s);
            // (P_m W_s^{-a} W_l^{b})^* = (W_l^*)^{b} (W_s^*)^{-a} P_m
            reports.push_back(series(
                "P_mW" + ss + "^{-r" + ss + "*n}W" + ls + "^{+r" + ls + "*n}",
                [&](std::int64_t n) { return ShiftProduct{{ws, -rs * n}, {wl, rl * n}}; },
                [&](std::int64_t n) { return ShiftProduct{{wla, rl * n}, {wsa, -rs * n}}; }));
        }
    }
    return reports;
}

std::vector<DecayReport> check_dual_theorem_conditions(const CriterionInstance& inst, const WitnessBundle& bundle,
                                                       double tol, const NormOptions& norm) {
    inst.validate(false);
    bundle.validate();
    if (bundle.g_seqs.size() != inst.size()) throw std::invalid_argument("bundle has the wrong number of G sequences");
    const std::size_t K = bundle.length();
    const std::size_t N = inst.size();
    const FiniteMatrix pn = FiniteMatrix::projection(bundle.m);
    const std::int64_t window = bundle.m;

    auto series = [&](const std::string& label, const auto& value_at) {
        std::vector<DecaySample> samples;
        for (std::size_t i = 0; i < K; ++i) {
            samples.push_back(linear_sample(static_cast<std::int64_t>(i + 1), bundle.n_seq[i], value_at(i)));
        }
        return make_report(label, std::move(samples), tol);
    };

    std::vector<DecayReport> reports;
    reports.push_back(series("s:D_k-P_n", [&](std::size_t i) { return strong_residual(bundle.d_seq[i], pn, window); }));
    for (std::size_t l = 1; l <= N; ++l) {
        reports.push_back(series("s:G" + std::to_string(l) + "_k-P_n", [&](std::size_t i) {
            return strong_residual(bundle.g_seqs[l - 1][i], pn, window);
        }));
    }
    for (std::size_t l = 1; l <= N; ++l) {
        const WeightedShift& w = inst.shifts[l - 1];
        const std::int64_t r = inst.r[l - 1];
        const auto ls = std::to_string(l);
        reports.push_back(series("D_kW" + ls + "^{+r" + ls + "*n}", [&](std::size_t i) {
            return op_norm(right_multiply(bundle.d_seq[i], {{w, r * bundle.n_seq[i]}}, inst.limits), norm);
        }));
        reports.push_back(series("G" + ls + "_kW" + ls + "^{-r" + ls + "*n}", [&](std::size_t i) {
            return op_norm(right_multiply(bundle.g_seqs[l - 1][i], {{w, -r * bundle.n_seq[i]}}, inst.limits), norm);
        }));
    }
    for (std::size_t l = 1; l <= N; ++l) {
        for (std::size_t s = 1; s <= N; ++s) {
            if (s == l) continue;
            const WeightedShift& wl = inst.shifts[l - 1];
            const WeightedShift& ws = inst.shifts[s - 1];
            const std::int64_t rl = inst.r[l - 1];
            const std::int64_t rs = inst.r[s - 1];
            const auto ls = std::to_string(l);
            const auto ss = std::to_string(s);
            reports.push_back(
                series("G" + ls + "_kW" + ss + "^{-r" + ss + "*n}W" + ls + "^{+r" + ls + "*n}", [&](std::size_t i) {
                    const std::int64_t n = bundle.n_seq[i];
                    const ShiftProduct prod{{ws, -rs * n}, {wl, rl * n}};
                    return op_norm(right_multiply(bundle.g_seqs[l - 1][i], prod, inst.limits), norm);
                }));
        }
    }
    return reports;
}

std::vector<DecayReport> verify_eta_convergence(const WitnessBundle& bundle, const FunctionalRep& psi,
                                                std::span<const FunctionalRep> phis, const CriterionInstance& inst,
                                                const TestSet& probes, double tol) {
    const std::size_t K = bundle.length();
    const std::size_t N = inst.size();
    const FunctionalRep psi_target = m_d_projection(psi, bundle.m);
    std::vector<FunctionalRep> phi_targets;
    for (const auto& phi : phis) phi_targets.push_back(m_d_projection(phi, bundle.m));

    std::vector<DecaySample> eta_samples;
    std::vector<std::vector<DecaySample>> image_samples(N);
    for (std::size_t i = 0; i < K; ++i) {
        const auto k = static_cast<std::int64_t>(i + 1);
        const std::int64_t n = bundle.n_seq[i];
        const FunctionalRep eta = construct_eta(bundle, psi, phis, inst, i + 1);
        eta_samples.push_back(linear_sample(k, n, weak_star_distance(eta, psi_target, probes)));
        for (std::size_t l = 1; l <= N; ++l) {
            const FunctionalRep image = dual_apply_power(inst.op(l), inst.r[l - 1] * n, eta, inst.limits);
            image_samples[l - 1].push_back(linear_sample(k, n, weak_star_distance(image, phi_targets[l - 1], probes)));
        }
    }
    std::vector<DecayReport> reports;
    reports.push_back(make_report("w*:eta_k-M_{P_n}psi", std::move(eta_samples), tol));
    for (std::size_t l = 1; l <= N; ++l) {
        const auto ls = std::to_string(l);
        reports.push_back(make_report("w*:T" + ls + "*^{+r" + ls + "*n}eta_k-M_{P_n}phi" + ls,
                                      std::move(image_samples[l - 1]), tol));
    }
    return reports;
}

}  // namespace opdyn
