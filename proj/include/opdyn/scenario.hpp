#pragma once

// Scenario files ("opdyn-scenario v1") and the batch runner behind the CLI.
//
// A scenario is a line-oriented "key = value" file whose first non-comment
// line is the schema marker. Example:
//
//     opdyn-scenario v1
//     name = example24
//     mode = example24
//     unitary = translation 1
//     shift = piecewise 2 1/2
//     shift = piecewise 3 1/3
//     r = 1 2
//     m = 0 1 2 3 4
//
// Keys: name, mode, orientation, unitary, shift (repeatable), r, n_seq, m,
// k_max, tol, horizon, window_cap, target_f, target_e (repeatable), seed.
// Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opdyn/criteria.hpp"
#include "opdyn/elementary.hpp"
#include "opdyn/lattice.hpp"

namespace opdyn {

enum class Mode {
    Corollary,
    Theorem,
    CriterionPointwise,
    ConstructPhi,
    Orbit,
    DualTransitivity,
    Example24,
    Example28,
};

std::string to_string(Mode mode);

struct Scenario {
    std::string name;
    Mode mode = Mode::Corollary;
    Orientation orientation = Orientation::WFU;
    std::optional<PermutationUnitary> unitary;
    std::vector<WeightedShift> shifts;
    std::vector<std::int64_t> r;
    NSequence n_seq = NSequence::all();
    std::vector<std::int64_t> m_values{1};
    std::int64_t k_max = 50;
    double tol = kDefaultTol;
    Limits limits{};
    std::optional<std::filesystem::path> target_f;
    std::vector<std::filesystem::path> target_e;
    std::uint64_t seed = 1;
    std::filesystem::path base_dir;  ///< matrix paths resolve against this

    /// Criterion instance for one window radius.
    CriterionInstance instance(std::int64_t m) const;
    /// Consistency diagnostics (empty when runnable).
    std::vector<std::string> diagnostics() const;
};

/// Throws SchemaError on syntax errors, unknown or duplicate keys.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
/// Reads a file, or a built-in when source is "builtin:<name>".
Scenario load_scenario(const std::string& source);

struct BuiltinScenario {
    std::string name;
    std::string description;
    std::string text;
};
const std::vector<BuiltinScenario>& builtin_scenarios();

struct Overrides {
    std::optional<double> tol;
    std::optional<std::int64_t> k_max;
    std::optional<std::int64_t> horizon;
};

void apply_overrides(Scenario& s, const Overrides& o);

/// Exit codes of a run.
enum ExitCode : int {
    kExitOk = 0,
    kExitVerdict = 1,
    kExitSchema = 2,
    kExitWindow = 3,
    kExitConvergence = 4,
};

struct RunResult {
    int exit_code = kExitOk;
    std::string summary;
};

/// Runs the scenario and writes report.csv, summary.txt and any constructed
/// finmat files into out_dir. Errors are mapped to exit codes, not thrown.
RunResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

/// Diagnostics for a scenario file without running it; {"ok"} when clean.
std::vector<std::string> validate_scenario(const std::string& source);

}  // namespace opdyn
