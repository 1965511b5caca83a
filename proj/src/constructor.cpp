#include "opdyn/constructor.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "opdyn/errors.hpp"

namespace opdyn {

void WitnessBundle::validate() const {
    if (d_seq.size() != n_seq.size()) throw std::invalid_argument("bundle: D_k count differs from n_seq length");
    for (const auto& g : g_seqs) {
        if (g.size() != n_seq.size()) throw std::invalid_argument("bundle: G_k count differs from n_seq length");
    }
    for (std::size_t i = 1; i < n_seq.size(); ++i) {
        if (n_seq[i] <= n_seq[i - 1]) throw std::invalid_argument("bundle: n_seq not strictly increasing");
    }
}

WitnessBundle projection_bundle(const CriterionInstance& inst) {
    inst.validate(false);
    WitnessBundle b;
    b.m = inst.m;
    b.n_seq = inst.n_values();
    const FiniteMatrix pm = FiniteMatrix::projection(inst.m);
    b.d_seq.assign(b.n_seq.size(), pm);
    b.g_seqs.assign(inst.size(), std::vector<FiniteMatrix>(b.n_seq.size(), pm));
    return b;
}

WitnessBundle extract_witnesses(std::span<const FiniteMatrix> f_seq, std::span<const std::int64_t> n_seq,
                                const CriterionInstance& inst) {
    inst.validate(false);
    if (f_seq.size() != n_seq.size()) throw std::invalid_argument("one approximant F_k per n_k is required");
    const bool wfu = inst.orientation == Orientation::WFU;
    WitnessBundle b;
    b.m = inst.m;
    b.n_seq.assign(n_seq.begin(), n_seq.end());
    b.g_seqs.resize(inst.size());
    for (std::size_t i = 0; i < f_seq.size(); ++i) {
        // WFU: D_k = F_k P_m, G_k = T^{p}(F_k) P_m.  UFW: D_k = P_m F_k, G_k = P_m T^{p}(F_k).
        b.d_seq.push_back(wfu ? truncate_right(f_seq[i], inst.m) : truncate_left(f_seq[i], inst.m));
        for (std::size_t l = 1; l <= inst.size(); ++l) {
            const FiniteMatrix moved = apply_power(inst.op(l), inst.r[l - 1] * n_seq[i], f_seq[i], inst.limits);
            b.g_seqs[l - 1].push_back(wfu ? truncate_right(moved, inst.m) : truncate_left(moved, inst.m));
        }
    }
    b.validate();
    return b;
}

namespace {

void check_compatible(const WitnessBundle& bundle, const TargetTuple& targets, const CriterionInstance& inst) {
    bundle.validate();
    if (bundle.g_seqs.size() != inst.size()) throw std::invalid_argument("bundle has the wrong number of G sequences");
    if (targets.e.size() != inst.size()) throw std::invalid_argument("one target E_l per operator is required");
    if (targets.m != bundle.m) throw std::invalid_argument("target window m differs from the bundle's m");
    if (inst.r.size() != inst.size()) throw std::invalid_argument("instance needs one exponent per operator");
}

// Left product in WFU orientation, right product in UFW (the mirrored construction).
FiniteMatrix oriented(const CriterionInstance& inst, const FiniteMatrix& witness, const FiniteMatrix& target) {
    return inst.orientation == Orientation::WFU ? compose(witness, target) : compose(target, witness);
}

FiniteMatrix cut(const CriterionInstance& inst, const FiniteMatrix& a, std::int64_t m) {
    return inst.orientation == Orientation::WFU ? truncate_left(a, m) : truncate_right(a, m);
}

}  // namespace

FiniteMatrix construct_phi(const WitnessBundle& bundle, const TargetTuple& targets, const CriterionInstance& inst,
                           std::size_t k) {
    check_compatible(bundle, targets, inst);
    if (k < 1 || k > bundle.length()) throw std::out_of_range("k outside the bundle");
    const std::size_t i = k - 1;
    const std::int64_t n = bundle.n_seq[i];
    FiniteMatrix phi = oriented(inst, bundle.d_seq[i], targets.f);
    for (std::size_t l = 1; l <= inst.size(); ++l) {
        const FiniteMatrix corr = oriented(inst, bundle.g_seqs[l - 1][i], targets.e[l - 1]);
        phi += apply_power(inst.op(l), -inst.r[l - 1] * n, corr, inst.limits);
    }
    return phi;
}

std::vector<DecayReport> PhiConvergence::all_reports() const {
    std::vector<DecayReport> out{phi_distance};
    out.insert(out.end(), image_distance.begin(), image_distance.end());
    out.insert(out.end(), terms.begin(), terms.end());
    return out;
}

PhiConvergence verify_phi_convergence(const WitnessBundle& bundle, const TargetTuple& targets,
                                      const CriterionInstance& inst, double tol, const NormOptions& norm) {
    check_compatible(bundle, targets, inst);
    const std::size_t K = bundle.length();
    const std::size_t N = inst.size();
    const std::int64_t m = bundle.m;
    const FiniteMatrix pm = FiniteMatrix::projection(m);
    const FiniteMatrix base = cut(inst, targets.f, m);
    const double f_norm = op_norm(targets.f, norm);
    std::vector<FiniteMatrix> goal;
    for (const auto& e : targets.e) goal.push_back(cut(inst, e, m));

    std::vector<DecaySample> phi_samples;
    std::vector<std::vector<DecaySample>> image_samples(N);
    // term series, in report order: D_k-P_m; per l: T_l(D_kF), S_l(G_lE_l), G_lE_l-P_mE_l; per (l, s): T_l S_s(G_sE_s)
    std::vector<std::string> term_labels{"D_k-P_m"};
    for (std::size_t l = 1; l <= N; ++l) {
        const auto ls = std::to_string(l);
        term_labels.push_back("T" + ls + "^{+r" + ls + "*n}(D_kF)");
        term_labels.push_back("S" + ls + "^{+r" + ls + "*n}(G" + ls + "_kE" + ls + ")");
        term_labels.push_back("G" + ls + "_kE" + ls + "-P_mE" + ls);
    }
    for (std::size_t l = 1; l <= N; ++l)
        for (std::size_t s = 1; s <= N; ++s)
            if (s != l) {
                const auto ls = std::to_string(l);
                const auto ss = std::to_string(s);
                term_labels.push_back("T" + ls + "^{+r" + ls + "*n}S" + ss + "^{+r" + ss + "*n}(G" + ss + "_kE" + ss +
                                      ")");
            }
    std::vector<std::vector<DecaySample>> term_samples(term_labels.size());

    PhiConvergence out;
    for (std::size_t i = 0; i < K; ++i) {
        const auto k = static_cast<std::int64_t>(i + 1);
        const std::int64_t n = bundle.n_seq[i];
        const FiniteMatrix phi = construct_phi(bundle, targets, inst, i + 1);
        const FiniteMatrix first = oriented(inst, bundle.d_seq[i], targets.f);

        std::vector<FiniteMatrix> corrections;  // G_l E_l
        std::vector<FiniteMatrix> pulled;       // S_l^{r_l n}(G_l E_l)
        for (std::size_t l = 1; l <= N; ++l) {
            corrections.push_back(oriented(inst, bundle.g_seqs[l - 1][i], targets.e[l - 1]));
            pulled.push_back(apply_power(inst.op(l), -inst.r[l - 1] * n, corrections.back(), inst.limits));
        }

        std::size_t t = 0;
        const double d_minus_p = op_norm(bundle.d_seq[i] - pm, norm);
        term_samples[t++].push_back(linear_sample(k, n, d_minus_p));

        double phi_bound = d_minus_p * f_norm;
        std::vector<double> image_bound(N, 0.0);
        for (std::size_t l = 1; l <= N; ++l) {
            const std::int64_t p = inst.r[l - 1] * n;
            const double forward_first = op_norm(apply_power(inst.op(l), p, first, inst.limits), norm);
            const double pulled_norm = op_norm(pulled[l - 1], norm);
            const double corr_gap = op_norm(corrections[l - 1] - goal[l - 1], norm);
            term_samples[t++].push_back(linear_sample(k, n, forward_first));
            term_samples[t++].push_back(linear_sample(k, n, pulled_norm));
            term_samples[t++].push_back(linear_sample(k, n, corr_gap));
            phi_bound += pulled_norm;
            image_bound[l - 1] += forward_first + corr_gap;
        }
        for (std::size_t l = 1; l <= N; ++l)
            for (std::size_t s = 1; s <= N; ++s)
                if (s != l) {
                    const std::int64_t p = inst.r[l - 1] * n;
                    const double cross = op_norm(apply_power(inst.op(l), p, pulled[s - 1], inst.limits), norm);
                    term_samples[t++].push_back(linear_sample(k, n, cross));
                    image_bound[l - 1] += cross;
                }

        DecaySample ps = linear_sample(k, n, op_norm(phi - base, norm));
        ps.bound = phi_bound;
        ps.bound_ok = ps.value <= phi_bound + 1e-8;
        out.triangle_holds = out.triangle_holds && ps.bound_ok;
        phi_samples.push_back(ps);

        for (std::size_t l = 1; l <= N; ++l) {
            const FiniteMatrix image = apply_power(inst.op(l), inst.r[l - 1] * n, phi, inst.limits);
            DecaySample s = linear_sample(k, n, op_norm(image - goal[l - 1], norm));
            s.bound = image_bound[l - 1];
            s.bound_ok = s.value <= image_bound[l - 1] + 1e-8;
            out.triangle_holds = out.triangle_holds && s.bound_ok;
            image_samples[l - 1].push_back(s);
        }
    }

    out.phi_distance = make_report("phi_k-P_mF", std::move(phi_samples), tol);
    for (std::size_t l = 1; l <= N; ++l) {
        const auto ls = std::to_string(l);
        out.image_distance.push_back(
            make_report("T" + ls + "^{+r" + ls + "*n}(phi_k)-P_mE" + ls, std::move(image_samples[l - 1]), tol));
    }
    for (std::size_t t = 0; t < term_labels.size(); ++t) {
        out.terms.push_back(make_report(term_labels[t], std::move(term_samples[t]), tol));
    }
    return out;
}

namespace {

std::string numbered(const std::string& stem, std::size_t k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", k);
    return stem + "_" + buf + ".finmat";
}

}  // namespace

void write_bundle(const std::filesystem::path& dir, const WitnessBundle& bundle, std::span<const std::int64_t> r) {
    bundle.validate();
    std::filesystem::create_directories(dir);
    std::ofstream manifest(dir / "manifest.txt", std::ios::binary);
    if (!manifest) throw std::runtime_error("cannot write bundle manifest in " + dir.string());
    manifest << "witness-bundle v1\n";
    manifest << "m " << bundle.m << "\n";
    manifest << "N " << bundle.g_seqs.size() << "\n";
    manifest << "r";
    for (auto v : r) manifest << ' ' << v;
    manifest << "\nn_seq";
    for (auto v : bundle.n_seq) manifest << ' ' << v;
    manifest << "\n";
    for (std::size_t i = 0; i < bundle.length(); ++i) {
        write_finmat(dir / numbered("D", i + 1), bundle.d_seq[i]);
        for (std::size_t l = 0; l < bundle.g_seqs.size(); ++l) {
            write_finmat(dir / numbered("G" + std::to_string(l + 1), i + 1), bundle.g_seqs[l][i]);
        }
    }
}

WitnessBundle read_bundle(const std::filesystem::path& dir, std::vector<std::int64_t>* r) {
    std::ifstream manifest(dir / "manifest.txt", std::ios::binary);
    if (!manifest) throw SchemaError("missing manifest.txt in " + dir.string());
    std::string line;
    if (!std::getline(manifest, line) || line != "witness-bundle v1") {
        throw SchemaError("bundle manifest lacks the 'witness-bundle v1' header");
    }
    WitnessBundle b;
    std::size_t n_ops = 0;
    std::vector<std::int64_t> exps;
    while (std::getline(manifest, line)) {
        std::istringstream in(line);
        std::string key;
        if (!(in >> key)) continue;
        std::int64_t v = 0;
        if (key == "m") {
            in >> b.m;
        } else if (key == "N") {
            in >> n_ops;
        } else if (key == "r") {
            while (in >> v) exps.push_back(v);
        } else if (key == "n_seq") {
            while (in >> v) b.n_seq.push_back(v);
        } else {
            throw SchemaError("unknown bundle manifest key '" + key + "'");
        }
    }
    b.g_seqs.resize(n_ops);
    for (std::size_t i = 0; i < b.n_seq.size(); ++i) {
        b.d_seq.push_back(read_finmat(dir / numbered("D", i + 1)));
        for (std::size_t l = 0; l < n_ops; ++l) {
            b.g_seqs[l].push_back(read_finmat(dir / numbered("G" + std::to_string(l + 1), i + 1)));
        }
    }
    b.validate();
    if (r) *r = std::move(exps);
    return b;
}

}  // namespace opdyn
