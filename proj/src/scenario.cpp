#include "opdyn/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "opdyn/errors.hpp"
#include "opdyn/numfmt.hpp"

namespace opdyn {

namespace {

const std::map<std::string, Mode>& mode_names() {
    static const std::map<std::string, Mode> names{
        {"corollary", Mode::Corollary},
        {"theorem", Mode::Theorem},
        {"criterion-pointwise", Mode::CriterionPointwise},
        {"construct-phi", Mode::ConstructPhi},
        {"orbit", Mode::Orbit},
        {"dual-transitivity", Mode::DualTransitivity},
        {"example24", Mode::Example24},
        {"example28", Mode::Example28},
    };
    return names;
}

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::int64_t parse_int(const std::string& tok, const std::string& key) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw SchemaError("key '" + key + "': expected an integer, got '" + tok + "'");
    }
    return v;
}

std::vector<std::int64_t> parse_ints(const std::vector<std::string>& toks, std::size_t from, const std::string& key) {
    std::vector<std::int64_t> out;
    for (std::size_t i = from; i < toks.size(); ++i) out.push_back(parse_int(toks[i], key));
    return out;
}

WeightedShift parse_shift(const std::vector<std::string>& toks_in) {
    std::vector<std::string> toks = toks_in;
    bool adjoint = false;
    if (!toks.empty() && toks.back() == "adjoint") {
        adjoint = true;
        toks.pop_back();
    }
    if (toks.empty()) throw SchemaError("key 'shift': missing weight rule");
    std::optional<WeightRule> rule;
    try {
        if (toks[0] == "unit" && toks.size() == 1) {
            rule = WeightRule::constant(1.0);
        } else if (toks[0] == "piecewise" && (toks.size() == 3 || toks.size() == 4)) {
            const Index split = toks.size() == 4 ? parse_int(toks[3], "shift") : 0;
            rule = WeightRule::piecewise(parse_double(toks[1]), parse_double(toks[2]), split);
        } else if (toks[0] == "table" && toks.size() >= 2) {
            std::map<Index, double> entries;
            for (std::size_t i = 2; i < toks.size(); ++i) {
                const auto colon = toks[i].find(':');
                if (colon == std::string::npos) throw SchemaError("key 'shift': table entries are 'index:weight'");
                const Index j = parse_int(toks[i].substr(0, colon), "shift");
                if (!entries.emplace(j, parse_double(toks[i].substr(colon + 1))).second) {
                    throw SchemaError("key 'shift': duplicate table index " + std::to_string(j));
                }
            }
            rule = WeightRule::table(std::move(entries), parse_double(toks[1]));
        } else {
            throw SchemaError("key 'shift': expected 'unit', 'piecewise <neg> <nonneg> [split]' or "
                              "'table <default> <j>:<w>...'");
        }
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("key 'shift': ") + e.what());
    }
    WeightedShift w(*rule);
    return adjoint ? w.adjoint() : w;
}

PermutationUnitary parse_unitary(const std::vector<std::string>& toks) {
    try {
        if (toks.size() == 2 && toks[0] == "translation") {
            return PermutationUnitary::translation(parse_int(toks[1], "unitary"));
        }
        if (toks.size() >= 3 && toks[0] == "table") {
            return PermutationUnitary::table(parse_int(toks[1], "unitary"), parse_ints(toks, 2, "unitary"));
        }
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("key 'unitary': ") + e.what());
    }
    throw SchemaError("key 'unitary': expected 'translation <t>' or 'table <lo> <images...>'");
}

NSequence parse_nseq(const std::vector<std::string>& toks) {
    if (toks.size() == 1 && toks[0] == "all") return NSequence::all();
    if (toks.size() == 3 && toks[0] == "arithmetic") {
        return NSequence::arithmetic(parse_int(toks[1], "n_seq"), parse_int(toks[2], "n_seq"));
    }
    if (toks.size() >= 2 && (toks[0] == "list" || toks[0] == "explicit")) {
        return NSequence::list(parse_ints(toks, 1, "n_seq"));
    }
    throw SchemaError("key 'n_seq': expected 'all', 'arithmetic <first> <step>' or 'list <n1> <n2> ...'");
}

const std::string kExample24 = R"(opdyn-scenario v1
# Bilateral shifts with weights 2 | 1/2 and 3 | 1/3 split at index 0,
# translation unitary, exponents r_2 = 2 r_1.
name = example24
mode = example24
orientation = WFU
unitary = translation 1
shift = piecewise 2 1/2
shift = piecewise 3 1/3
r = 1 2
n_seq = all
m = 0 1 2 3 4
k_max = 50
tol = 1e-6
seed = 7
)";

const std::string kExample28 = R"(opdyn-scenario v1
# Dual tuple built on the adjoints of the example24 shifts.
name = example28
mode = example28
orientation = WFU
unitary = translation 1
shift = piecewise 2 1/2
shift = piecewise 3 1/3
r = 1 2
n_seq = all
m = 0 1 2 3 4
k_max = 50
tol = 1e-6
seed = 11
)";

const std::string kPhi = R"(opdyn-scenario v1
# Synthesis of phi_k for random unit-norm targets on the example24 tuple.
name = example24-phi
mode = construct-phi
unitary = translation 1
shift = piecewise 2 1/2
shift = piecewise 3 1/3
r = 1 2
m = 1
k_max = 50
seed = 2024
)";

const std::string kTheorem = R"(opdyn-scenario v1
# Witnesses extracted from synthesized approximants, checked against the
# characterization's conditions.
name = example24-theorem
mode = theorem
unitary = translation 1
shift = piecewise 2 1/2
shift = piecewise 3 1/3
r = 1 2
m = 1
k_max = 50
)";

const std::string kPointwise = R"(opdyn-scenario v1
name = example24-pointwise
mode = criterion-pointwise
unitary = translation 1
shift = piecewise 2 1/2
shift = piecewise 3 1/3
r = 1 2
m = 4
k_max = 50
seed = 99
)";

const std::string kOrbit = R"(opdyn-scenario v1
# Joint orbit of P_0 with distances to the zero target.
name = example24-orbit
mode = orbit
unitary = translation 1
shift = piecewise 2 1/2
shift = piecewise 3 1/3
r = 1 2
m = 0
k_max = 20
)";

const std::string kUnit = R"(opdyn-scenario v1
# Isometric shifts: nothing decays.
name = unit-weights
mode = corollary
unitary = translation 1
shift = unit
shift = unit
r = 1 2
m = 1
k_max = 50
)";

}  // namespace

std::string to_string(Mode mode) {
    for (const auto& [name, m] : mode_names())
        if (m == mode) return name;
    return "corollary";
}

CriterionInstance Scenario::instance(std::int64_t m) const {
    if (!unitary) throw SchemaError("scenario has no unitary");
    return CriterionInstance{
        .shifts = shifts,
        .unitary = *unitary,
        .r = r,
        .n_seq = n_seq,
        .m = m,
        .k_max = k_max,
        .limits = limits,
        .orientation = orientation,
    };
}

std::vector<std::string> Scenario::diagnostics() const {
    std::vector<std::string> out;
    auto add = [&](const std::string& d) {
        if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
    };
    if (!unitary) add("missing key 'unitary'");
    if (shifts.empty()) add("missing key 'shift'");
    if (r.empty()) add("missing key 'r'");
    if (m_values.empty()) add("key 'm' needs at least one value");
    if (!(tol > 0.0)) add("tol must be positive");
    if (!unitary) return out;
    const bool pair = mode != Mode::Orbit && mode != Mode::ConstructPhi && mode != Mode::Theorem;
    for (auto m : m_values)
        for (const auto& d : instance(m).diagnostics(pair)) add(d);
    if (mode == Mode::Example24 || mode == Mode::Example28) {
        if (shifts.size() != 2 || r.size() != 2 || r[1] != 2 * r[0]) add("example modes need N = 2 with r_2 = 2 r_1");
    }
    if (!target_e.empty() && target_e.size() != shifts.size()) add("target_e must list one matrix per shift");
    return out;
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    Scenario s;
    s.base_dir = base_dir;
    std::istringstream in{std::string(text)};
    std::string raw;
    bool header = false;
    std::set<std::string> seen;
    const std::set<std::string> repeatable{"shift", "target_e"};
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty()) continue;
        if (!header) {
            if (line != "opdyn-scenario v1") throw SchemaError("first line must be 'opdyn-scenario v1'");
            header = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw SchemaError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const auto toks = split_ws(value);
        if (toks.empty()) throw SchemaError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
        if (!repeatable.count(key) && !seen.insert(key).second) {
            throw SchemaError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        auto single = [&]() -> const std::string& {
            if (toks.size() != 1) throw SchemaError("key '" + key + "' takes a single value");
            return toks[0];
        };

        if (key == "name") {
            s.name = value;
        } else if (key == "mode") {
            auto it = mode_names().find(single());
            if (it == mode_names().end()) throw SchemaError("unknown mode '" + toks[0] + "'");
            s.mode = it->second;
        } else if (key == "orientation") {
            s.orientation = parse_orientation(single());
        } else if (key == "unitary") {
            s.unitary = parse_unitary(toks);
        } else if (key == "shift") {
            s.shifts.push_back(parse_shift(toks));
        } else if (key == "r") {
            s.r = parse_ints(toks, 0, key);
        } else if (key == "n_seq") {
            s.n_seq = parse_nseq(toks);
        } else if (key == "m") {
            s.m_values = parse_ints(toks, 0, key);
        } else if (key == "k_max") {
            s.k_max = parse_int(single(), key);
        } else if (key == "tol") {
            s.tol = parse_double(single());
        } else if (key == "horizon") {
            s.limits.horizon = parse_int(single(), key);
        } else if (key == "window_cap") {
            s.limits.window_cap = parse_int(single(), key);
        } else if (key == "target_f") {
            s.target_f = single();
        } else if (key == "target_e") {
            s.target_e.emplace_back(single());
        } else if (key == "seed") {
            const auto v = parse_int(single(), key);
            if (v < 0) throw SchemaError("seed must be nonnegative");
            s.seed = static_cast<std::uint64_t>(v);
        } else {
            throw SchemaError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (!header) throw SchemaError("empty scenario: missing 'opdyn-scenario v1' marker");
    if (s.name.empty()) throw SchemaError("missing key 'name'");
    if (!seen.count("mode")) throw SchemaError("missing key 'mode'");
    return s;
}

const std::vector<BuiltinScenario>& builtin_scenarios() {
    static const std::vector<BuiltinScenario> all{
        {"example24", "sufficient conditions and displayed bounds for the 2|1/2, 3|1/3 shift pair", kExample24},
        {"example28", "dual conditions on the adjoint shifts, adjoint symmetry and eta_k convergence", kExample28},
        {"example24-phi", "synthesis of phi_k for random unit-norm targets", kPhi},
        {"example24-theorem", "witness extraction round trip through the characterization", kTheorem},
        {"example24-pointwise", "pointwise d-hypercyclicity criterion on P_m F seeds", kPointwise},
        {"example24-orbit", "joint orbit distances of P_0", kOrbit},
        {"unit-weights", "isometric shifts, expected to fail", kUnit},
    };
    return all;
}

Scenario load_scenario(const std::string& source) {
    constexpr std::string_view prefix = "builtin:";
    if (source.rfind(prefix, 0) == 0) {
        const std::string name = source.substr(prefix.size());
        for (const auto& b : builtin_scenarios())
            if (b.name == name) return parse_scenario(b.text);
        throw SchemaError("no built-in scenario named '" + name + "'");
    }
    std::ifstream in(source, std::ios::binary);
    if (!in) throw SchemaError("cannot read scenario file " + source);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), std::filesystem::path(source).parent_path());
}

void apply_overrides(Scenario& s, const Overrides& o) {
    if (o.tol) s.tol = *o.tol;
    if (o.k_max) s.k_max = *o.k_max;
    if (o.horizon) s.limits.horizon = *o.horizon;
}

std::vector<std::string> validate_scenario(const std::string& source) {
    try {
        const Scenario s = load_scenario(source);
        auto d = s.diagnostics();
        for (const auto& p : s.target_e)
            if (!std::filesystem::exists(s.base_dir / p)) d.push_back("missing matrix file " + p.string());
        if (s.target_f && !std::filesystem::exists(s.base_dir / *s.target_f)) {
            d.push_back("missing matrix file " + s.target_f->string());
        }
        if (d.empty()) return {"ok"};
        return d;
    } catch (const SchemaError& e) {
        return {std::string("schema: ") + e.what()};
    }
}

}  // namespace opdyn
