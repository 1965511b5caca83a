#include "doctest.h"

#include <cmath>
#include <random>

#include "opdyn/errors.hpp"
#include "opdyn/lattice.hpp"
#include "opdyn/opspace.hpp"
#include "oracle.hpp"

using namespace opdyn;

namespace {

const WeightedShift W1(WeightRule::piecewise(2.0, 0.5));
const WeightedShift W2(WeightRule::piecewise(3.0, 1.0 / 3.0));

// pi(lo + i) = lo + 3 i mod 17 on [-8, 8].
PermutationUnitary interleave() {
    std::vector<Index> images;
    for (Index i = 0; i < 17; ++i) images.push_back(-8 + (3 * i) % 17);
    return PermutationUnitary::table(-8, images);
}

}  // namespace

TEST_CASE("weight rules") {
    const WeightRule r = WeightRule::piecewise(2.0, 0.5);
    CHECK(r(-1) == 2.0);
    CHECK(r(0) == 0.5);
    CHECK(r(-100) == 2.0);
    CHECK(r(7) == 0.5);

    const WeightRule t = WeightRule::table({{0, 4.0}, {3, 0.25}}, 1.0);
    CHECK(t(0) == 4.0);
    CHECK(t(3) == 0.25);
    CHECK(t(1) == 1.0);
    CHECK(t.log_sum(-2, 4) == doctest::Approx(0.0));
    CHECK(t.product(0, 3) == 1.0);

    CHECK(r.log_sum(-3, 2) == doctest::Approx(3 * std::log(2.0) + 3 * std::log(0.5)));
    // shifted(t)(j) = r(j - t)
    CHECK(r.shifted(1)(0) == 2.0);
    CHECK(r.shifted(1)(1) == 0.5);
    CHECK(r.shifted(-3)(-3) == 0.5);

    CHECK_THROWS_AS(WeightRule::piecewise(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightRule::piecewise(1.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightRule::piecewise(INFINITY, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightRule::table({{1, 0.0}}, 1.0), std::invalid_argument);
}

TEST_CASE("shift powers on basis vectors") {
    auto v = shift_power_apply(W1, 1, -1);
    CHECK(v.index == 0);
    CHECK(v.value() == doctest::Approx(2.0));

    v = shift_power_apply(W1, 0, 5);
    CHECK(v.index == 5);
    CHECK(v.value() == 1.0);

    v = shift_power_apply(W1, 2, -1);
    CHECK(v.index == 1);
    CHECK(v.value() == doctest::Approx(1.0));
    CHECK(W1.power_coefficient(2, -1, 100) == 1.0);

    v = shift_power_apply(W1, -3, 2);
    CHECK(v.index == -1);
    CHECK(v.value() == doctest::Approx(oracle::shift_power(oracle::w1, -3, {2, 1.0}).coeff));

    CHECK_THROWS_AS(shift_power_apply(W1, 10'001, 0), HorizonError);
    CHECK_THROWS_AS(shift_power_apply(W1, -10'001, 0), HorizonError);
    CHECK_NOTHROW(shift_power_apply(W1, 10'000, 0));
}

TEST_CASE("shift powers agree with the step-by-step oracle") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = oracle::uniform_int(gen, -60, 60);
        const auto j = oracle::uniform_int(gen, -40, 40);
        const bool second = trial % 2 == 1;
        const auto v = shift_power_apply(second ? W2 : W1, n, j);
        const auto o = oracle::shift_power(second ? oracle::Weight(oracle::w2) : oracle::Weight(oracle::w1), n, {j, 1.0});
        CHECK(v.index == o.index);
        CHECK(v.log_coeff == doctest::Approx(std::log(o.coeff)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("inverse round trip returns e_j") {
    std::mt19937_64 gen(3);
    const WeightedShift tab(WeightRule::table({{-2, 5.0}, {0, 0.1}, {4, 7.5}}, 1.5));
    for (const auto* w : {&W1, &W2, &tab}) {
        for (int trial = 0; trial < 200; ++trial) {
            const auto n = oracle::uniform_int(gen, -200, 200);
            const auto j = oracle::uniform_int(gen, -50, 50);
            const auto there = shift_power_apply(*w, n, j);
            const auto back = shift_power_apply(*w, -n, there.index);
            CHECK(back.index == j);
            CHECK(std::abs(there.log_coeff + back.log_coeff) <= 1e-12 * std::max(1.0, std::abs(there.log_coeff)));
        }
    }
}

TEST_CASE("adjoint shift is the transpose") {
    const WeightedShift a = W1.adjoint();
    CHECK(a.step() == -1);
    for (Index j = -5; j <= 5; ++j) {
        // <W e_j, e_{j+1}> = <e_j, W* e_{j+1}>
        const auto fw = shift_power_apply(W1, 1, j);
        const auto bw = shift_power_apply(a, 1, j + 1);
        CHECK(bw.index == j);
        CHECK(bw.value() == doctest::Approx(fw.value()));
    }
    for (Index j = -6; j <= 6; ++j) {
        for (std::int64_t n : {-4, -1, 2, 5}) {
            const auto fw = shift_power_apply(W2, n, j);
            const auto bw = shift_power_apply(W2.adjoint(), n, fw.index);
            CHECK(bw.index == j);
            CHECK(bw.log_coeff == doctest::Approx(fw.log_coeff).epsilon(1e-12));
        }
    }
    CHECK(a.adjoint() == W1);
}

TEST_CASE("unitary powers") {
    const auto t1 = PermutationUnitary::translation(1);
    CHECK(unitary_power_apply(t1, 3, 0) == 3);
    CHECK(unitary_power_apply(t1, -2, 5) == 3);
    CHECK(unitary_power_apply(PermutationUnitary::translation(-4), 3, 1) == -11);
    CHECK_THROWS_AS(PermutationUnitary::translation(0), std::invalid_argument);

    const auto u = interleave();
    auto lookup = [](Index j) { return -8 + (3 * (j + 8)) % 17; };
    CHECK(unitary_power_apply(u, 2, 0) == lookup(lookup(0)));
    CHECK(unitary_power_apply(u, 1, -8) == -8);
    for (Index j = -8; j <= 8; ++j) {
        CHECK(unitary_power_apply(u, -1, unitary_power_apply(u, 1, j)) == j);
        CHECK(unitary_power_apply(u, 16, j) == j);  // 3 has order 16 mod 17
    }
    CHECK_THROWS_AS(unitary_power_apply(u, 1, 9), WindowError);
    CHECK_THROWS_AS(PermutationUnitary::table(0, {0, 0, 1}), std::invalid_argument);
    const auto leaky = PermutationUnitary::table(0, {0, 5});
    CHECK(unitary_power_apply(leaky, 1, 1) == 5);
    CHECK_THROWS_AS(unitary_power_apply(leaky, 2, 1), WindowError);
}

TEST_CASE("escape index") {
    const auto t1 = PermutationUnitary::translation(1);
    CHECK(escape_index(t1, 2, 100) == 5);
    CHECK(escape_index(PermutationUnitary::translation(3), 0, 100) == 1);
    CHECK(escape_index(t1, 0, 100) == 1);
    CHECK_FALSE(escape_index(t1, 3, 6).has_value());
    CHECK(escape_index(t1, 3, 7) == 7);

    for (std::int64_t t : {1, 2, 3, -2, 5, -7}) {
        for (std::int64_t m = 0; m <= 30; ++m) {
            const std::int64_t expect = (2 * m + 1 + std::abs(t) - 1) / std::abs(t);
            CHECK(escape_index(PermutationUnitary::translation(t), m, 500) == expect);
        }
    }

    // brute force over the horizon for a permutation of a finite window
    const auto u = interleave();
    for (std::int64_t m = 0; m <= 3; ++m) {
        for (std::int64_t h : {5, 16, 40, 100}) {
            std::int64_t last_hit = 0;
            for (std::int64_t n = 1; n <= h; ++n)
                for (Index j = -m; j <= m; ++j)
                    if (std::abs(unitary_power_apply(u, n, j)) <= m) last_hit = n;
            const auto got = escape_index(u, m, h);
            if (last_hit == h) {
                CHECK_FALSE(got.has_value());
            } else {
                CHECK(got == last_hit + 1);
            }
        }
    }
    CHECK_THROWS_AS(escape_index(t1, 1, 0), std::invalid_argument);
}

TEST_CASE("escape index on tables") {
    // pi(j) = j + 1 on [-4, 3], with 4 -> -4 closing the cycle
    std::vector<Index> images{-3, -2, -1, 0, 1, 2, 3, 4, -4};
    const auto u = PermutationUnitary::table(-4, images);
    CHECK(escape_index(u, 0, 8) == 1);
    CHECK(escape_index(u, 0, 20) == 19);
    CHECK_FALSE(escape_index(u, 0, 18).has_value());

    // pi(j) = j + 1 on [-2, 2] leaves the window after the last point
    const auto open = PermutationUnitary::table(-2, {-1, 0, 1, 2, 3});
    CHECK_FALSE(escape_index(open, 0, 10).has_value());
}

TEST_CASE("monomial product norms") {
    auto n2 = monomial_product_norm({{W1, 2}, {W2, -4}}, 0);
    CHECK(n2.value == doctest::Approx(4.0 / 81.0));
    CHECK(n2.argmax == 0);

    auto n3 = monomial_product_norm({{W1, 3}}, 0);
    CHECK(n3.value == doctest::Approx(0.125).epsilon(1e-15));

    auto id = monomial_product_norm({{W1, 0}}, 4);
    CHECK(id.value == 1.0);
    CHECK(id.argmax == -4);  // ties resolve to the smallest index

    CHECK_THROWS_AS(monomial_product_norm({{W1, 20'000}}, 0), HorizonError);
}

TEST_CASE("monomial product norm matches the dense spectral norm") {
    std::mt19937_64 gen(99);
    const std::vector<WeightedShift> shifts{W1, W2, WeightedShift(WeightRule::table({{1, 4.0}, {-3, 0.2}}, 0.9)),
                                            W1.adjoint()};
    const std::vector<oracle::Weight> weights{oracle::w1, oracle::w2, [](std::int64_t j) {
                                                  return j == 1 ? 4.0 : (j == -3 ? 0.2 : 0.9);
                                              }};
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = oracle::uniform_int(gen, 0, 10);
        ShiftProduct prod;
        std::vector<std::pair<oracle::Weight, std::int64_t>> ofactors;
        const auto nf = oracle::uniform_int(gen, 1, 3);
        for (std::int64_t f = 0; f < nf; ++f) {
            const auto which = static_cast<std::size_t>(oracle::uniform_int(gen, 0, 2));
            const auto p = oracle::uniform_int(gen, -10, 10);
            prod.push_back({shifts[which], p});
            ofactors.push_back({weights[which], p});
        }
        // dense matrix of prod * P_m from the step-by-step oracle
        FiniteMatrix a;
        for (Index j = -m; j <= m; ++j) {
            const auto v = oracle::product_apply(ofactors, j);
            a.set(v.index, j, v.coeff);
        }
        const double dense = oracle::spectral_norm(a);
        const double power = op_norm(a, {.tol = 1e-12, .split_components = false});
        const auto mono = monomial_product_norm(prod, m);
        CHECK(oracle::rel_close(mono.value, dense, 1e-8));
        CHECK(oracle::rel_close(mono.value, power, 1e-8));
    }
}

TEST_CASE("displayed cross-term bound holds pointwise") {
    for (std::int64_t r1 : {1, 2}) {
        for (std::int64_t m = 0; m <= 4; ++m) {
            for (std::int64_t n = 1; n <= 40; ++n) {
                const auto v = monomial_product_norm({{W1, r1 * n}, {W2, -2 * r1 * n}}, m);
                const double tight = 2.0 * m * std::log(3.0) + r1 * n * std::log(2.0) - 2.0 * r1 * n * std::log(3.0);
                const double loose = 2.0 * m * std::log(3.0) - r1 * n * std::log(3.0);
                CHECK(v.log_value <= tight + 1e-10 * std::max(1.0, std::abs(tight)));
                CHECK(tight <= loose);
            }
        }
    }
}

TEST_CASE("products with huge exponents stay finite in log domain") {
    const auto v = monomial_product_norm({{W1, 5000}, {W2, -10'000}}, 4);
    CHECK(std::isfinite(v.log_value));
    CHECK(v.value == 0.0);
    const double expect = 8 * std::log(3.0) + 5000 * std::log(2.0) - 10'000 * std::log(3.0);
    CHECK(v.log_value == doctest::Approx(expect).epsilon(1e-12));
}
