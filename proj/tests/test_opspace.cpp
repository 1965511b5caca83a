#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "opdyn/errors.hpp"
#include "opdyn/opspace.hpp"
#include "oracle.hpp"

using namespace opdyn;

TEST_CASE("construction drops tiny entries and rejects non-finite ones") {
    FiniteMatrix a{{0, 0, 1.0}, {1, 2, 1e-301}, {3, -1, -2.5}};
    CHECK(a.nnz() == 2);
    CHECK(a.at(1, 2) == 0.0);
    CHECK(a.at(3, -1) == -2.5);
    const auto s = a.support();
    REQUIRE(s.has_value());
    CHECK(s->row_min == 0);
    CHECK(s->row_max == 3);
    CHECK(s->col_min == -1);
    CHECK(s->col_max == 0);
    CHECK_FALSE(FiniteMatrix{}.support().has_value());
    CHECK_THROWS_AS(a.set(0, 0, NAN), WindowError);
    CHECK_THROWS_AS(a.set(0, 0, INFINITY), WindowError);

    a.add(0, 0, -1.0);
    CHECK(a.nnz() == 1);
}

TEST_CASE("projections are idempotent and self-adjoint") {
    for (std::int64_t m = 0; m <= 6; ++m) {
        const auto p = FiniteMatrix::projection(m);
        CHECK(p.nnz() == static_cast<std::size_t>(2 * m + 1));
        CHECK(compose(p, p) == p);
        CHECK(p.transpose() == p);
    }
    CHECK_THROWS_AS(FiniteMatrix::projection(-1), std::invalid_argument);
}

TEST_CASE("compose") {
    CHECK(compose(FiniteMatrix::projection(2), FiniteMatrix::projection(1)) == FiniteMatrix::projection(1));
    CHECK(compose(FiniteMatrix::unit(0, 0), FiniteMatrix::unit(0, 0)) == FiniteMatrix::unit(0, 0));
    CHECK(compose(FiniteMatrix::unit(1, 0, 2.0), FiniteMatrix::unit(0, -1, 3.0)) == FiniteMatrix::unit(1, -1, 6.0));

    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = oracle::random_sparse(gen, -4, 3, 0.4);
        const auto b = oracle::random_sparse(gen, -3, 4, 0.4);
        const auto c = compose(a, b);
        const Eigen::MatrixXd expect = oracle::dense(a, -4, 4) * oracle::dense(b, -4, 4);
        const Eigen::MatrixXd got = oracle::dense(c, -4, 4);
        CHECK((expect - got).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("operator norm examples") {
    CHECK(op_norm(FiniteMatrix::projection(3)) == 1.0);
    CHECK(op_norm(FiniteMatrix::unit(5, -5, 2.0)) == 2.0);
    CHECK(op_norm(FiniteMatrix{}) == 0.0);
    const FiniteMatrix jordan{{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}};
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(std::abs(op_norm(jordan) - golden) <= 1e-8);
    CHECK(std::abs(op_norm(jordan, {.split_components = false}) - golden) <= 1e-8);
    CHECK_THROWS_AS(op_norm(jordan, {.tol = 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(op_norm(jordan, {.tol = 0.1}), std::invalid_argument);
}

TEST_CASE("power iteration reports non-convergence") {
    std::mt19937_64 gen(8);
    const auto a = oracle::random_dense(gen, 0, 7);
    CHECK_THROWS_AS(op_norm(a, {.tol = 1e-12, .max_iter = 1}), ConvergenceError);
    CHECK_THROWS_AS(trace_norm(a, {.max_sweeps = 0}), ConvergenceError);
}

TEST_CASE("operator norm against dense SVD") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto lo = oracle::uniform_int(gen, -6, 0);
        const auto hi = lo + oracle::uniform_int(gen, 0, 9);
        const auto a = trial % 2 == 0 ? oracle::random_dense(gen, lo, hi) : oracle::random_sparse(gen, lo, hi, 0.3);
        const double expect = oracle::spectral_norm(a);
        CHECK(oracle::rel_close(op_norm(a), expect, 1e-8, 1e-12));
        CHECK(oracle::rel_close(op_norm(a, {.split_components = false}), expect, 1e-8, 1e-12));
    }
}

TEST_CASE("trace norm examples and dense SVD agreement") {
    CHECK(trace_norm(FiniteMatrix::projection(4)) == doctest::Approx(9.0));
    CHECK(trace_norm(FiniteMatrix::unit(2, 7, 3.0)) == doctest::Approx(3.0));
    // e_0 -> 2 e_1, e_3 -> 5 e_{-1}
    const FiniteMatrix mono{{1, 0, 2.0}, {-1, 3, 5.0}};
    CHECK(trace_norm(mono) == doctest::Approx(7.0));
    CHECK(trace_norm(FiniteMatrix{}) == 0.0);

    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = oracle::random_sparse(gen, -5, 4, 0.5);
        CHECK(oracle::rel_close(trace_norm(a), oracle::trace_norm(a), 1e-10, 1e-12));
    }
}

TEST_CASE("norm inequalities on random instances") {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = oracle::random_sparse(gen, -4, 4, 0.5);
        const auto b = oracle::random_sparse(gen, -4, 4, 0.5);
        const auto ab = compose(a, b);
        CHECK(op_norm(ab) <= op_norm(a) * op_norm(b) + 1e-8);
        CHECK(trace_norm(ab) <= trace_norm(a) * op_norm(b) + 1e-8);
        CHECK(op_norm(a) <= trace_norm(a) + 1e-8);
        CHECK(op_norm(a) <= frobenius_norm(a) + 1e-12);
    }
}

TEST_CASE("monomial matrices: norm is the largest coefficient") {
    std::mt19937_64 gen(14);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = oracle::random_monomial(gen, oracle::uniform_int(gen, 1, 25));
        REQUIRE(a.is_monomial());
        CHECK(op_norm(a) == a.max_abs());
        double sum = 0.0;
        for (const auto& [key, v] : a.entries()) sum += std::abs(v);
        CHECK(oracle::rel_close(trace_norm(a), sum, 1e-12));
        CHECK(oracle::rel_close(op_norm(a, {.split_components = false}), a.max_abs(), 1e-8));
    }
    CHECK_FALSE(FiniteMatrix{{0, 0, 1.0}, {0, 1, 1.0}}.is_monomial());
}

TEST_CASE("truncation") {
    CHECK(truncate_left(FiniteMatrix::unit(5, 0), 2).empty());
    CHECK(truncate_left(FiniteMatrix::projection(3), 1) == FiniteMatrix::projection(1));
    CHECK(truncate_right(FiniteMatrix::unit(0, 5), 2).empty());

    std::mt19937_64 gen(15);
    const auto a = oracle::random_dense(gen, -4, 4);
    CHECK(truncate_left(a, 4) == a);
    CHECK(truncate_right(a, 4) == a);
    // P_m A -> A, exactly once m covers the support
    double prev = op_norm(a - truncate_left(a, 0));
    for (std::int64_t m = 1; m <= 6; ++m) {
        const double d = op_norm(a - truncate_left(a, m));
        CHECK(d <= prev + 1e-12);
        prev = d;
    }
    CHECK(prev == 0.0);
    CHECK(truncate_left(a, 2) == compose(FiniteMatrix::projection(2), a));
    CHECK(truncate_right(a, 2) == compose(a, FiniteMatrix::projection(2)));
}

TEST_CASE("transport by shift products matches dense multiplication") {
    const WeightedShift w1(WeightRule::piecewise(2.0, 0.5));
    const WeightedShift w2(WeightRule::piecewise(3.0, 1.0 / 3.0));
    std::mt19937_64 gen(16);
    for (int trial = 0; trial < 40; ++trial) {
        const auto a = oracle::random_sparse(gen, -3, 3, 0.5);
        const auto p1 = oracle::uniform_int(gen, -4, 4);
        const auto p2 = oracle::uniform_int(gen, -4, 4);
        const ShiftProduct prod{{w1, p1}, {w2, p2}};
        // dense matrix of the product on a window wide enough for every path
        FiniteMatrix dense_prod;
        for (Index j = -20; j <= 20; ++j) {
            const auto v = oracle::product_apply({{oracle::w1, p1}, {oracle::w2, p2}}, j);
            dense_prod.set(v.index, j, v.coeff);
        }
        const auto left = left_multiply(prod, a);
        const auto expect_left = compose(dense_prod, a);
        CHECK(op_norm(left - expect_left) <= 1e-12 * std::max(1.0, op_norm(expect_left)));

        const auto right = right_multiply(a, prod);
        const auto expect_right = compose(a, dense_prod);
        CHECK(op_norm(right - expect_right) <= 1e-12 * std::max(1.0, op_norm(expect_right)));
    }

    const auto u = PermutationUnitary::translation(2);
    const auto a = FiniteMatrix::unit(1, -1, 4.0);
    // U^3 e_1 = e_7
    CHECK(left_multiply(u, 3, a) == FiniteMatrix::unit(7, -1, 4.0));
    // (A U^3) e_{-7} = A e_{-1}
    CHECK(right_multiply(a, u, 3) == FiniteMatrix::unit(1, -7, 4.0));
    CHECK_THROWS_AS(left_multiply(u, 20'000, a), HorizonError);
    CHECK_THROWS_AS(left_multiply(u, 10, a, Limits{.horizon = 100, .window_cap = 5}), WindowError);
}

TEST_CASE("finmat round trip is bit exact") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 50; ++trial) {
        FiniteMatrix a = oracle::random_sparse(gen, -6, 6, 0.3);
        a.set(100, -100, 1e-300 * 3);
        a.set(-3, 2, 1.0 / 3.0);
        a.set(4, 4, 6.02214076e23);
        const auto text = to_finmat(a);
        CHECK(text.rfind("finmat v1\n", 0) == 0);
        CHECK(parse_finmat(text) == a);
    }
    const auto path = std::filesystem::temp_directory_path() / "opdyn_test_roundtrip.finmat";
    const FiniteMatrix b{{0, 0, 0.1}, {-2, 5, -7.25}};
    write_finmat(path, b);
    CHECK(read_finmat(path) == b);
    std::filesystem::remove(path);

    CHECK(to_finmat(FiniteMatrix{}) == "finmat v1\n");
    CHECK(parse_finmat("finmat v1\n0 0 1/4\n") == FiniteMatrix::unit(0, 0, 0.25));
    CHECK_THROWS_AS(parse_finmat("0 0 1\n"), SchemaError);
    CHECK_THROWS_AS(parse_finmat("finmat v1\n0 0 1\n0 0 2\n"), SchemaError);
    CHECK_THROWS_AS(parse_finmat("finmat v1\n0 x 1\n"), SchemaError);
    CHECK_THROWS_AS(parse_finmat("finmat v1\n0 0 nan\n"), SchemaError);
    CHECK_THROWS_AS(parse_finmat("finmat v1\n0 0\n"), SchemaError);
    CHECK_THROWS_AS(read_finmat("/nonexistent/opdyn.finmat"), SchemaError);
}

TEST_CASE("norms are deterministic") {
    std::mt19937_64 gen(31);
    const auto a = oracle::random_dense(gen, -5, 5);
    const double first = op_norm(a);
    for (int i = 0; i < 5; ++i) CHECK(op_norm(a) == first);
}
