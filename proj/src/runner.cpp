#include <cmath>
#include <fstream>
#include <sstream>

#include "opdyn/constructor.hpp"
#include "opdyn/duality.hpp"
#include "opdyn/errors.hpp"
#include "opdyn/numfmt.hpp"
#include "opdyn/random.hpp"
#include "opdyn/scenario.hpp"

namespace opdyn {

namespace {

struct ModeOutput {
    std::vector<DecayReport> reports;
    std::string csv;  // overrides reports_csv when set (orbit mode)
    std::vector<std::string> notes;
    bool success = true;
};

std::uint64_t derived_seed(std::uint64_t base, std::int64_t m, std::uint64_t slot) {
    return base * 1'000'003ULL + static_cast<std::uint64_t>(m) * 101ULL + slot;
}

void prefix_all(std::vector<DecayReport>& reports, std::int64_t m) {
    for (auto& r : reports) r.quantity = "m=" + std::to_string(m) + ":" + r.quantity;
}

bool verdicts_pass(const std::vector<DecayReport>& reports) {
    for (const auto& r : reports)
        if (r.verdict != Verdict::DecaysBelow || !r.bounds_hold()) return false;
    return true;
}

FiniteMatrix load_matrix(const Scenario& s, const std::filesystem::path& p) {
    const auto full = s.base_dir / p;
    if (!std::filesystem::exists(full)) throw SchemaError("missing matrix file " + p.string());
    return read_finmat(full);
}

TargetTuple targets_for(const Scenario& s, std::int64_t m) {
    TargetTuple t;
    t.m = m;
    t.f = s.target_f ? load_matrix(s, *s.target_f) : random_matrix(derived_seed(s.seed, m, 0), -m, m);
    for (std::size_t l = 1; l <= s.shifts.size(); ++l) {
        t.e.push_back(s.target_e.empty() ? random_matrix(derived_seed(s.seed, m, l), -m, m)
                                         : load_matrix(s, s.target_e[l - 1]));
    }
    return t;
}

// Closed-form displayed bounds for the N = 2, r_2 = 2 r_1 shift pair:
// ||W1^{r1 n} W2^{-2 r1 n} P_m|| <= 3^{2m} 2^{r1 n} / 3^{2 r1 n} and
// ||W2^{2 r1 n} W1^{-r1 n} P_m|| <= 3^{2m} / 2^{r1 n}.
void attach_example_bounds(std::vector<DecayReport>& reports, std::int64_t m, std::int64_t r1) {
    const double ln2 = std::log(2.0);
    const double ln3 = std::log(3.0);
    for (auto& rep : reports) {
        const bool forward = rep.quantity == label_cross(1, 2);
        const bool mirror = rep.quantity == label_cross(2, 1);
        if (!forward && !mirror) continue;
        for (auto& s : rep.samples) {
            const double t = static_cast<double>(r1 * s.n);
            const double log_bound = forward ? 2.0 * m * ln3 + t * ln2 - 2.0 * t * ln3 : 2.0 * m * ln3 - t * ln2;
            s.bound = std::exp(log_bound);
            s.bound_ok = s.log_value <= log_bound + 1e-10 * std::max(1.0, std::abs(log_bound));
        }
    }
}

ModeOutput run_corollary(const Scenario& s, bool example) {
    ModeOutput out;
    for (auto m : s.m_values) {
        auto reports = check_corollary_sufficient(s.instance(m), s.tol);
        if (example) attach_example_bounds(reports, m, s.r[0]);
        prefix_all(reports, m);
        for (auto& r : reports) out.reports.push_back(std::move(r));
    }
    out.success = verdicts_pass(out.reports);
    return out;
}

ModeOutput run_theorem(const Scenario& s, const std::filesystem::path& out_dir) {
    ModeOutput out;
    for (auto m : s.m_values) {
        const CriterionInstance inst = s.instance(m);
        // Approximants phi_k carrying (P_m, P_m, ..., P_m); the witnesses read
        // back from them must satisfy the conditions again.
        const WitnessBundle base = projection_bundle(inst);
        const FiniteMatrix pm = FiniteMatrix::projection(m);
        TargetTuple targets{pm, std::vector<FiniteMatrix>(inst.size(), pm), m};
        if (s.target_f) targets.f = load_matrix(s, *s.target_f);
        std::vector<FiniteMatrix> phis;
        for (std::size_t k = 1; k <= base.length(); ++k) phis.push_back(construct_phi(base, targets, inst, k));
        const WitnessBundle bundle = extract_witnesses(phis, base.n_seq, inst);
        write_bundle(out_dir / ("witnesses_m" + std::to_string(m)), bundle, inst.r);
        auto reports = check_theorem_conditions(inst, bundle.d_seq, bundle.g_seqs, s.tol);
        prefix_all(reports, m);
        for (auto& r : reports) out.reports.push_back(std::move(r));
    }
    out.success = verdicts_pass(out.reports);
    return out;
}

ModeOutput run_pointwise(const Scenario& s) {
    ModeOutput out;
    for (auto m : s.m_values) {
        std::vector<FiniteMatrix> seeds{FiniteMatrix::projection(m), random_matrix(derived_seed(s.seed, m, 0), -m, m)};
        if (s.target_f) seeds.push_back(load_matrix(s, *s.target_f));
        auto reports = check_dhc_criterion_pointwise(s.instance(m), seeds, s.tol);
        prefix_all(reports, m);
        for (auto& r : reports) out.reports.push_back(std::move(r));
    }
    out.success = verdicts_pass(out.reports);
    return out;
}

ModeOutput run_construct_phi(const Scenario& s, const std::filesystem::path& out_dir) {
    ModeOutput out;
    bool triangle = true;
    for (auto m : s.m_values) {
        const CriterionInstance inst = s.instance(m);
        const WitnessBundle bundle = projection_bundle(inst);
        const TargetTuple targets = targets_for(s, m);
        const PhiConvergence conv = verify_phi_convergence(bundle, targets, inst, s.tol);
        triangle = triangle && conv.triangle_holds;
        const std::size_t last = bundle.length();
        write_finmat(out_dir / ("phi_m" + std::to_string(m) + "_k" + std::to_string(last) + ".finmat"),
                     construct_phi(bundle, targets, inst, last));
        auto reports = conv.all_reports();
        prefix_all(reports, m);
        for (auto& r : reports) out.reports.push_back(std::move(r));
    }
    out.notes.push_back(std::string("triangle decomposition: ") + (triangle ? "holds" : "violated"));
    out.success = triangle && verdicts_pass(out.reports);
    return out;
}

ModeOutput run_orbit(const Scenario& s) {
    ModeOutput out;
    const std::int64_t m = s.m_values.front();
    std::vector<OrbitMember> members;
    for (std::size_t l = 0; l < s.shifts.size(); ++l) {
        members.push_back({ElementaryOp(*s.unitary, s.shifts[l], s.orientation), s.r.at(l)});
    }
    const FiniteMatrix f = s.target_f ? load_matrix(s, *s.target_f) : FiniteMatrix::projection(m);
    std::vector<FiniteMatrix> targets;
    for (std::size_t l = 0; l < s.shifts.size(); ++l) {
        targets.push_back(s.target_e.empty() ? FiniteMatrix{} : load_matrix(s, s.target_e[l]));
    }
    const auto rows = orbit_distance_trace(members, f, targets, s.k_max, s.limits);
    out.csv = orbit_csv(rows);
    out.notes.push_back("orbit rows: " + std::to_string(rows.size()));
    if (!rows.empty()) {
        double best = rows.front().distance;
        for (const auto& r : rows) best = std::min(best, r.distance);
        out.notes.push_back("minimum distance: " + format_sci17(best));
    }
    return out;
}

ModeOutput run_dual(const Scenario& s, bool use_adjoints) {
    ModeOutput out;
    Scenario dual = s;
    if (use_adjoints) {
        for (auto& w : dual.shifts) w = w.adjoint();
    }
    bool symmetric = true;
    for (auto m : dual.m_values) {
        const CriterionInstance inst = dual.instance(m);
        auto reports = check_dual_corollary(inst, dual.tol);
        for (const auto& r : reports) symmetric = symmetric && r.bounds_hold();

        const WitnessBundle bundle = projection_bundle(inst);
        for (auto& r : check_dual_theorem_conditions(inst, bundle, dual.tol)) reports.push_back(std::move(r));

        const FunctionalRep psi{random_matrix(derived_seed(s.seed, m, 0), -m - 2, m + 2)};
        std::vector<FunctionalRep> phis;
        for (std::size_t l = 1; l <= inst.size(); ++l) {
            phis.push_back({random_matrix(derived_seed(s.seed, m, l), -m - 2, m + 2)});
        }
        for (auto& r : verify_eta_convergence(bundle, psi, phis, inst, TestSet::defaults(m), dual.tol)) {
            reports.push_back(std::move(r));
        }
        prefix_all(reports, m);
        for (auto& r : reports) out.reports.push_back(std::move(r));
    }
    out.notes.push_back(std::string("adjoint symmetry (1e-10 relative in logs): ") + (symmetric ? "holds" : "violated"));
    out.success = verdicts_pass(out.reports);
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

std::string header(const Scenario& s) {
    std::ostringstream o;
    o << "scenario: " << s.name << "\n"
      << "mode: " << to_string(s.mode) << "\n"
      << "orientation: " << to_string(s.orientation) << "\n"
      << "tol: " << format_shortest(s.tol) << "\n"
      << "k_max: " << s.k_max << "\n"
      << "horizon: " << s.limits.horizon << "\n";
    return o.str();
}

}  // namespace

RunResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir) {
    RunResult result;
    std::string body;
    try {
        std::filesystem::create_directories(out_dir);
        const auto diags = s.diagnostics();
        if (!diags.empty()) {
            std::string msg;
            for (const auto& d : diags) msg += (msg.empty() ? "" : "; ") + d;
            throw SchemaError(msg);
        }
        ModeOutput out;
        switch (s.mode) {
            case Mode::Corollary: out = run_corollary(s, false); break;
            case Mode::Example24: out = run_corollary(s, true); break;
            case Mode::Theorem: out = run_theorem(s, out_dir); break;
            case Mode::CriterionPointwise: out = run_pointwise(s); break;
            case Mode::ConstructPhi: out = run_construct_phi(s, out_dir); break;
            case Mode::Orbit: out = run_orbit(s); break;
            case Mode::DualTransitivity: out = run_dual(s, false); break;
            case Mode::Example28: out = run_dual(s, true); break;
        }
        write_text(out_dir / "report.csv", out.csv.empty() ? reports_csv(out.reports) : out.csv);
        result.exit_code = out.success ? kExitOk : kExitVerdict;
        body = reports_summary(out.reports);
        for (const auto& n : out.notes) body += n + "\n";
        body += std::string("result: ") + (out.success ? "pass" : "fail") + "\n";
    } catch (const SchemaError& e) {
        result.exit_code = kExitSchema;
        body = std::string("error (schema): ") + e.what() + "\n";
    } catch (const std::invalid_argument& e) {
        result.exit_code = kExitSchema;
        body = std::string("error (schema): ") + e.what() + "\n";
    } catch (const HorizonError& e) {
        result.exit_code = kExitWindow;
        body = std::string("error (horizon): ") + e.what() + "\n";
    } catch (const WindowError& e) {
        result.exit_code = kExitWindow;
        body = std::string("error (window): ") + e.what() + "\n";
    } catch (const ConvergenceError& e) {
        result.exit_code = kExitConvergence;
        body = std::string("error (convergence): ") + e.what() + "\n";
    }
    result.summary = header(s) + body;
    try {
        write_text(out_dir / "summary.txt", result.summary);
    } catch (const std::exception&) {
        // The summary is still returned to the caller.
    }
    return result;
}

}  // namespace opdyn
