#include "opdyn/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opdyn/numfmt.hpp"

namespace opdyn {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::DecaysBelow:
            return "decays-below";
        case Verdict::Fails:
            return "fails";
        case Verdict::Inconclusive:
            return "inconclusive";
    }
    return "fails";
}

bool DecayReport::bounds_hold() const {
    return std::all_of(samples.begin(), samples.end(), [](const DecaySample& s) { return s.bound_ok; });
}

DecaySample log_sample(std::int64_t k, std::int64_t n, double log_value) {
    return DecaySample{k, n, std::exp(log_value), log_value, std::nullopt, true};
}

DecaySample linear_sample(std::int64_t k, std::int64_t n, double value) {
    const double lv = value > 0.0 ? std::log(value) : -std::numeric_limits<double>::infinity();
    return DecaySample{k, n, value, lv, std::nullopt, true};
}

namespace {

std::optional<double> fit_log_rate(const std::vector<DecaySample>& samples) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    for (const auto& s : samples) {
        if (!std::isfinite(s.log_value)) continue;
        const auto x = static_cast<double>(s.n);
        sx += x;
        sy += s.log_value;
        sxx += x * x;
        sxy += x * s.log_value;
        ++count;
    }
    if (count < 2) return std::nullopt;
    const double c = static_cast<double>(count);
    const double denom = c * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    return (c * sxy - sx * sy) / denom;
}

}  // namespace

DecayReport make_report(std::string quantity, std::vector<DecaySample> samples, double tol) {
    DecayReport r;
    r.quantity = std::move(quantity);
    r.tol = tol;
    r.fitted_rate = fit_log_rate(samples);
    // Walk backwards to the earliest k after which everything stays below tol.
    std::optional<std::int64_t> at;
    for (auto it = samples.rbegin(); it != samples.rend() && it->value < tol; ++it) at = it->k;
    r.at_k = at;
    r.samples = std::move(samples);
    if (at) {
        r.verdict = Verdict::DecaysBelow;
    } else if (r.fitted_rate && *r.fitted_rate < 0.0) {
        r.verdict = Verdict::Inconclusive;
    } else {
        r.verdict = Verdict::Fails;
    }
    return r;
}

bool all_decay(std::span<const DecayReport> reports) {
    return std::all_of(reports.begin(), reports.end(),
                       [](const DecayReport& r) { return r.verdict == Verdict::DecaysBelow; });
}

std::string reports_csv(std::span<const DecayReport> reports, bool with_header) {
    std::string out = with_header ? "quantity,k,n_k,value,bound,verdict\n" : "";
    for (const auto& r : reports) {
        const std::string verdict = to_string(r.verdict);
        for (const auto& s : r.samples) {
            out += r.quantity;
            out += ',' + std::to_string(s.k) + ',' + std::to_string(s.n) + ',' + format_sci17(s.value) + ',';
            if (s.bound) out += format_sci17(*s.bound);
            out += ',' + verdict + '\n';
        }
    }
    return out;
}

std::string reports_summary(std::span<const DecayReport> reports) {
    std::string out;
    std::size_t decaying = 0;
    for (const auto& r : reports) {
        out += "quantity: " + r.quantity + "\n";
        out += "  verdict: " + to_string(r.verdict) + " (tol " + format_sci17(r.tol);
        if (r.at_k) out += ", from k=" + std::to_string(*r.at_k);
        out += ")\n";
        out += "  fitted log-rate: " + (r.fitted_rate ? format_sci17(*r.fitted_rate) : std::string("n/a")) + "\n";
        if (!r.samples.empty()) {
            const auto& last = r.samples.back();
            out += "  last value (k=" + std::to_string(last.k) + ", n_k=" + std::to_string(last.n) +
                   "): " + format_sci17(last.value) + "\n";
        }
        if (std::any_of(r.samples.begin(), r.samples.end(), [](const DecaySample& s) { return s.bound.has_value(); })) {
            out += std::string("  bounds: ") + (r.bounds_hold() ? "hold" : "VIOLATED") + "\n";
        }
        if (r.verdict == Verdict::DecaysBelow) ++decaying;
    }
    out += "reports decaying below tol: " + std::to_string(decaying) + " of " + std::to_string(reports.size()) + "\n";
    return out;
}

}  // namespace opdyn
