#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "opdyn/constructor.hpp"
#include "opdyn/errors.hpp"
#include "opdyn/random.hpp"
#include "oracle.hpp"

using namespace opdyn;

namespace {

const WeightedShift W1(WeightRule::piecewise(2.0, 0.5));
const WeightedShift W2(WeightRule::piecewise(3.0, 1.0 / 3.0));
const PermutationUnitary U1 = PermutationUnitary::translation(1);

// The mirrored orientation needs right-sided decay, which the adjoint shifts supply.
CriterionInstance example(std::int64_t m, std::int64_t k_max, Orientation o = Orientation::WFU) {
    const bool wfu = o == Orientation::WFU;
    return CriterionInstance{.shifts = {wfu ? W1 : W1.adjoint(), wfu ? W2 : W2.adjoint()},
                             .unitary = U1,
                             .r = {1, 2},
                             .m = m,
                             .k_max = k_max,
                             .orientation = o};
}

CriterionInstance single(std::int64_t k_max) {
    return CriterionInstance{.shifts = {W1}, .unitary = U1, .r = {1}, .m = 0, .k_max = k_max};
}

TargetTuple random_targets(std::int64_t m, std::uint64_t seed) {
    return TargetTuple{random_matrix(seed, -m, m), {random_matrix(seed + 1, -m, m), random_matrix(seed + 2, -m, m)}, m};
}

}  // namespace

TEST_CASE("projection bundle") {
    const auto b = projection_bundle(example(2, 7));
    CHECK(b.m == 2);
    CHECK(b.n_seq == std::vector<std::int64_t>{1, 2, 3, 4, 5, 6, 7});
    CHECK(b.d_seq.size() == 7);
    REQUIRE(b.g_seqs.size() == 2);
    CHECK(b.g_seqs[1][6] == FiniteMatrix::projection(2));
    CHECK_NOTHROW(b.validate());

    auto broken = b;
    broken.g_seqs[0].pop_back();
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("witness extraction") {
    const auto inst = example(1, 10);
    const auto pm = FiniteMatrix::projection(1);

    SUBCASE("projection approximants") {
        const std::vector<FiniteMatrix> f(10, pm);
        const auto b = extract_witnesses(f, inst.n_values(), inst);
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(b.d_seq[i] == pm);
            const auto n = b.n_seq[i];
            CHECK(b.g_seqs[0][i] == truncate_right(apply_power(inst.op(1), n, pm), 1));
            CHECK(b.g_seqs[1][i] == truncate_right(apply_power(inst.op(2), 2 * n, pm), 1));
        }
    }
    SUBCASE("perturbed approximants") {
        std::vector<FiniteMatrix> f;
        for (int k = 1; k <= 10; ++k) f.push_back(pm + FiniteMatrix::unit(0, 0, std::pow(4.0, -k)));
        const auto b = extract_witnesses(f, inst.n_values(), inst);
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(op_norm(b.d_seq[i] - pm) <= std::pow(4.0, -static_cast<double>(i + 1)) + 1e-15);
        }
    }
    SUBCASE("mismatched lengths") {
        const std::vector<FiniteMatrix> f(3, pm);
        CHECK_THROWS_AS(extract_witnesses(f, inst.n_values(), inst), std::invalid_argument);
    }
}

TEST_CASE("closed-form single-operator synthesis") {
    const auto inst = single(30);
    const auto bundle = projection_bundle(inst);
    const auto p0 = FiniteMatrix::projection(0);
    const TargetTuple targets{p0, {p0}, 0};
    for (std::size_t k = 1; k <= 30; ++k) {
        const auto phi = construct_phi(bundle, targets, inst, k);
        // phi_k = P_0 + W^{-k} P_0 U^{-k}
        const auto expect = p0 + apply_power(inst.op(1), -static_cast<std::int64_t>(k), p0);
        CHECK(phi == expect);
        const double d = op_norm(phi - p0);
        CHECK(std::abs(d - std::ldexp(1.0, -static_cast<int>(k))) <= 1e-12 * std::ldexp(1.0, -static_cast<int>(k)));
    }
    const auto conv = verify_phi_convergence(bundle, targets, inst);
    for (const auto& s : conv.phi_distance.samples) CHECK(s.value == std::ldexp(1.0, -static_cast<int>(s.k)));
    CHECK(conv.triangle_holds);

    const TargetTuple pulled{FiniteMatrix{}, {p0}, 0};
    for (std::size_t k = 1; k <= 30; ++k) {
        const auto phi = construct_phi(bundle, pulled, inst, k);
        CHECK(op_norm(phi) == std::ldexp(1.0, -static_cast<int>(k)));
        const auto image = apply_power(inst.op(1), static_cast<std::int64_t>(k), phi);
        CHECK((image - p0).empty());
    }
}

TEST_CASE("trivial targets") {
    const auto inst = example(1, 10);
    const auto bundle = projection_bundle(inst);
    const auto f = random_matrix(3, -1, 1);
    const TargetTuple no_e{f, {FiniteMatrix{}, FiniteMatrix{}}, 1};
    for (std::size_t k = 1; k <= 10; ++k) {
        CHECK(construct_phi(bundle, no_e, inst, k) == compose(bundle.d_seq[k - 1], f));
    }
    const TargetTuple zero{FiniteMatrix{}, {FiniteMatrix{}, FiniteMatrix{}}, 1};
    for (const auto& r : verify_phi_convergence(bundle, zero, inst).all_reports())
        for (const auto& s : r.samples) CHECK(s.value == 0.0);
    CHECK_THROWS_AS(construct_phi(bundle, no_e, inst, 11), std::out_of_range);
    CHECK_THROWS_AS(construct_phi(bundle, TargetTuple{f, {f}, 1}, inst, 1), std::invalid_argument);
}

TEST_CASE("synthesis for random unit-norm targets") {
    for (auto o : {Orientation::WFU, Orientation::UFW}) {
        const auto inst = example(1, 30, o);
        const auto bundle = projection_bundle(inst);
        const auto targets = random_targets(1, 41);
        const auto conv = verify_phi_convergence(bundle, targets, inst, 1e-6);
        CHECK(conv.triangle_holds);
        CHECK(conv.phi_distance.verdict == Verdict::DecaysBelow);
        REQUIRE(conv.image_distance.size() == 2);
        for (const auto& r : conv.image_distance) {
            CHECK(r.verdict == Verdict::DecaysBelow);
            CHECK(r.bounds_hold());
        }
        CHECK(conv.terms.size() == 1 + 3 * 2 + 2);
        CHECK(conv.phi_distance.quantity == "phi_k-P_mF");
        CHECK(conv.image_distance[1].quantity == "T2^{+r2*n}(phi_k)-P_mE2");
    }
}

TEST_CASE("triangle decomposition on random instances") {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = oracle::uniform_int(gen, 0, 3);
        const auto inst = example(m, 12);
        // noisy witnesses
        auto bundle = projection_bundle(inst);
        for (auto& d : bundle.d_seq) d += 0.01 * oracle::random_sparse(gen, -m - 1, m + 1, 0.3);
        for (auto& g : bundle.g_seqs)
            for (auto& x : g) x += 0.01 * oracle::random_sparse(gen, -m, m, 0.3);
        const auto conv = verify_phi_convergence(bundle, random_targets(m, 100 + trial), inst);
        CHECK(conv.triangle_holds);
        for (const auto& r : conv.image_distance) CHECK(r.bounds_hold());
        CHECK(conv.phi_distance.bounds_hold());
    }
}

TEST_CASE("distances scale with the targets") {
    const auto inst = example(1, 15);
    const auto bundle = projection_bundle(inst);
    const auto t = random_targets(1, 9);
    const double lambda = -2.5;
    const TargetTuple scaled{lambda * t.f, {lambda * t.e[0], lambda * t.e[1]}, 1};
    const auto a = verify_phi_convergence(bundle, t, inst).all_reports();
    const auto b = verify_phi_convergence(bundle, scaled, inst).all_reports();
    REQUIRE(a.size() == b.size());
    for (std::size_t q = 0; q < a.size(); ++q) {
        if (a[q].quantity == "D_k-P_m") continue;  // independent of the targets
        for (std::size_t i = 0; i < a[q].samples.size(); ++i) {
            CHECK(oracle::rel_close(b[q].samples[i].value, std::abs(lambda) * a[q].samples[i].value, 1e-10, 1e-300));
        }
    }
}

TEST_CASE("round trip through extraction") {
    for (auto o : {Orientation::WFU, Orientation::UFW}) {
        const auto inst = example(1, 40, o);
        const auto base = projection_bundle(inst);
        const auto pm = FiniteMatrix::projection(1);
        const TargetTuple targets{pm, {pm, pm}, 1};
        std::vector<FiniteMatrix> approximants;
        for (std::size_t k = 1; k <= base.length(); ++k) approximants.push_back(construct_phi(base, targets, inst, k));
        const auto bundle = extract_witnesses(approximants, base.n_seq, inst);
        const auto reports = check_theorem_conditions(inst, bundle.d_seq, bundle.g_seqs, 1e-6);
        for (const auto& r : reports) CHECK(r.verdict == Verdict::DecaysBelow);
    }
}

TEST_CASE("bundle files") {
    const auto dir = std::filesystem::temp_directory_path() / "opdyn_test_bundle";
    std::filesystem::remove_all(dir);
    const auto inst = example(1, 4);
    auto bundle = projection_bundle(inst);
    bundle.d_seq[2] += FiniteMatrix::unit(0, 1, 1.0 / 3.0);
    write_bundle(dir, bundle, inst.r);
    CHECK(std::filesystem::exists(dir / "manifest.txt"));
    CHECK(std::filesystem::exists(dir / "D_0003.finmat"));
    CHECK(std::filesystem::exists(dir / "G2_0004.finmat"));

    std::vector<std::int64_t> r;
    const auto back = read_bundle(dir, &r);
    CHECK(r == inst.r);
    CHECK(back.m == 1);
    CHECK(back.n_seq == bundle.n_seq);
    CHECK(back.d_seq == bundle.d_seq);
    CHECK(back.g_seqs == bundle.g_seqs);

    {
        std::ofstream f(dir / "manifest.txt", std::ios::trunc);
        f << "not a bundle\n";
    }
    CHECK_THROWS_AS(read_bundle(dir), SchemaError);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(read_bundle(dir), SchemaError);
}
