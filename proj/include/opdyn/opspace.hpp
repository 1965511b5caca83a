#pragma once

// Finite-rank operators on l2(Z) stored as sparse (row, col) -> value maps,
// with spectral and trace norms and transport by the structured operators
// of lattice.hpp.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "opdyn/lattice.hpp"

namespace opdyn {

struct MatrixEntry {
    Index row;
    Index col;
    double value;
};

class FiniteMatrix {
public:
    using Key = std::pair<Index, Index>;
    using Storage = std::map<Key, double>;

    /// Entries with magnitude below this are never stored.
    static constexpr double kDropBelow = 1e-300;

    FiniteMatrix() = default;
    FiniteMatrix(std::initializer_list<MatrixEntry> entries);

    static FiniteMatrix unit(Index row, Index col, double value = 1.0);
    /// P_m: ones on the diagonal of [-m, m].
    static FiniteMatrix projection(std::int64_t m);
    /// c * identity restricted to the diagonal of [lo, hi].
    static FiniteMatrix diagonal(Index lo, Index hi, double c = 1.0);

    double at(Index row, Index col) const;
    /// Overwrites an entry; tiny values erase it.
    void set(Index row, Index col, double value);
    /// Accumulates into an entry; a sum that falls below the threshold erases it.
    void add(Index row, Index col, double value);

    const Storage& entries() const { return entries_; }
    std::size_t nnz() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    struct Support {
        Index row_min, row_max, col_min, col_max;
    };
    std::optional<Support> support() const;

    /// At most one nonzero per row and per column.
    bool is_monomial() const;
    double max_abs() const;

    FiniteMatrix transpose() const;

    FiniteMatrix& operator+=(const FiniteMatrix& other);
    FiniteMatrix& operator-=(const FiniteMatrix& other);
    FiniteMatrix& operator*=(double c);
    friend FiniteMatrix operator+(FiniteMatrix a, const FiniteMatrix& b) { return a += b; }
    friend FiniteMatrix operator-(FiniteMatrix a, const FiniteMatrix& b) { return a -= b; }
    friend FiniteMatrix operator*(double c, FiniteMatrix a) { return a *= c; }
    friend FiniteMatrix operator*(FiniteMatrix a, double c) { return a *= c; }

    bool operator==(const FiniteMatrix&) const = default;

private:
    Storage entries_;
};

/// Tuning for the iterative norm routines.
struct NormOptions {
    double tol = 1e-12;                 ///< relative tolerance, must lie in (0, 1e-2]
    std::int64_t max_iter = 2'000'000;  ///< power-iteration cap
    int max_sweeps = 100;               ///< Jacobi sweep cap
    /// Solve each connected block of the row/column incidence graph on its
    /// own; 1x1 blocks (all of a monomial matrix) are then exact.
    bool split_components = true;
};

/// A * B.
FiniteMatrix compose(const FiniteMatrix& a, const FiniteMatrix& b);

/// Spectral norm by power iteration on A^T A (or A A^T, whichever is smaller)
/// over the compressed support, seeded deterministically from the support.
/// Throws ConvergenceError after opts.max_iter iterations.
double op_norm(const FiniteMatrix& a, const NormOptions& opts = {});

/// Sum of singular values via one-sided Jacobi.
double trace_norm(const FiniteMatrix& a, const NormOptions& opts = {});

double frobenius_norm(const FiniteMatrix& a);

/// P_m * A.
FiniteMatrix truncate_left(const FiniteMatrix& a, std::int64_t m);
/// A * P_m.
FiniteMatrix truncate_right(const FiniteMatrix& a, std::int64_t m);

/// (product) * A by entry transport.
FiniteMatrix left_multiply(const ShiftProduct& product, const FiniteMatrix& a, const Limits& limits = {});
/// A * (product) by entry transport.
FiniteMatrix right_multiply(const FiniteMatrix& a, const ShiftProduct& product, const Limits& limits = {});
/// U^p * A.
FiniteMatrix left_multiply(const PermutationUnitary& u, std::int64_t p, const FiniteMatrix& a,
                           const Limits& limits = {});
/// A * U^p.
FiniteMatrix right_multiply(const FiniteMatrix& a, const PermutationUnitary& u, std::int64_t p,
                            const Limits& limits = {});

/// "finmat v1" text: header line, then one "row col value" line per entry in
/// row-major order, values in shortest round-trip decimal.
std::string to_finmat(const FiniteMatrix& a);
FiniteMatrix parse_finmat(std::string_view text);
void write_finmat(const std::filesystem::path& path, const FiniteMatrix& a);
FiniteMatrix read_finmat(const std::filesystem::path& path);

}  // namespace opdyn
