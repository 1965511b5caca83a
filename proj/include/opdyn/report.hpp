#pragma once

// Numerical evidence for "lim_k value_k = 0": a sampled sequence, a
// threshold verdict and a fitted log-rate.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace opdyn {

enum class Verdict { DecaysBelow, Fails, Inconclusive };

std::string to_string(Verdict v);

struct DecaySample {
    std::int64_t k;
    std::int64_t n;           ///< n_k
    double value;
    double log_value;         ///< natural log of value; -inf for an exact zero
    std::optional<double> bound;
    bool bound_ok = true;
};

struct DecayReport {
    std::string quantity;
    std::vector<DecaySample> samples;
    Verdict verdict = Verdict::Fails;
    double tol = 0.0;
    std::optional<std::int64_t> at_k;   ///< first k from which every value stays below tol
    std::optional<double> fitted_rate;  ///< least-squares slope of log(value) against n_k

    bool bounds_hold() const;
};

/// Sample whose log is known exactly (log-domain quantities).
DecaySample log_sample(std::int64_t k, std::int64_t n, double log_value);
/// Sample from a linear value.
DecaySample linear_sample(std::int64_t k, std::int64_t n, double value);

/// Classifies the samples: decays-below if from some k on every value is
/// below tol; otherwise inconclusive when the fitted rate is negative and
/// fails when it is not.
DecayReport make_report(std::string quantity, std::vector<DecaySample> samples, double tol);

bool all_decay(std::span<const DecayReport> reports);

/// Header "quantity,k,n_k,value,bound,verdict"; empty bound when absent.
std::string reports_csv(std::span<const DecayReport> reports, bool with_header = true);
std::string reports_summary(std::span<const DecayReport> reports);

}  // namespace opdyn
