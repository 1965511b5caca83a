#pragma once

// Quantitative d-hypercyclicity conditions for tuples of elementary
// operators T_l = T_{U, W_l} and their powers T_l^{r_l}.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opdyn/elementary.hpp"
#include "opdyn/lattice.hpp"
#include "opdyn/opspace.hpp"
#include "opdyn/report.hpp"

namespace opdyn {

/// Strictly increasing sequence n_1 < n_2 < ... (1-based).
class NSequence {
public:
    /// n_k = k.
    static NSequence all();
    /// n_k = first + step * (k - 1).
    static NSequence arithmetic(std::int64_t first, std::int64_t step);
    static NSequence list(std::vector<std::int64_t> values);

    std::int64_t at(std::int64_t k) const;
    /// Number of terms for a finite list, nullopt otherwise.
    std::optional<std::int64_t> length() const;
    /// Problems found (non-positive terms, not strictly increasing).
    std::vector<std::string> diagnostics() const;

    enum class Kind { All, Arithmetic, List };
    Kind kind() const { return kind_; }
    std::int64_t first() const { return first_; }
    std::int64_t step() const { return step_; }
    const std::vector<std::int64_t>& values() const { return values_; }

private:
    Kind kind_ = Kind::All;
    std::int64_t first_ = 1;
    std::int64_t step_ = 1;
    std::vector<std::int64_t> values_;
};

struct CriterionInstance {
    std::vector<WeightedShift> shifts;  ///< W_1..W_N
    PermutationUnitary unitary;
    std::vector<std::int64_t> r;        ///< 0 < r_1 < ... < r_N
    NSequence n_seq = NSequence::all();
    std::int64_t m = 1;
    std::int64_t k_max = 50;
    Limits limits{};
    Orientation orientation = Orientation::WFU;

    std::size_t size() const { return shifts.size(); }
    /// T_l for 1-based l.
    ElementaryOp op(std::size_t l) const;
    /// n_1..n_K with K = k_max, or the list length when shorter.
    std::vector<std::int64_t> n_values() const;

    /// Consistency problems; empty when valid. Disjointness checks need N >= 2.
    std::vector<std::string> diagnostics(bool require_pair = true) const;
    /// Throws SchemaError listing every diagnostic.
    void validate(bool require_pair = true) const;
};

constexpr double kDefaultTol = 1e-6;

/// ||W_l^{r_l n_k} P_m||, ||W_l^{-r_l n_k} P_m|| for every l and
/// ||W_l^{r_l n_k} W_s^{-r_s n_k} P_m|| for every ordered pair l != s, all in
/// exact log-domain arithmetic.
std::vector<DecayReport> check_corollary_sufficient(const CriterionInstance& inst, double tol = kDefaultTol);

/// The three families of conditions on witness sequences D_k, G_k^{(l)}:
/// ||D_k - P_m||, ||G_k^{(l)} - P_m||, ||W_l^{r_l n_k} D_k||,
/// ||W_l^{-r_l n_k} G_k^{(l)}|| and ||W_l^{r_l n_k} W_s^{-r_s n_k} G_k^{(s)}||.
/// g_seqs[l-1][k-1] holds G_k^{(l)}. With UFW orientation the shift powers
/// multiply on the right: ||D_k W_l^{r_l n_k}||, ||G_k^{(l)} W_l^{-r_l n_k}||
/// and ||G_k^{(s)} W_s^{-r_s n_k} W_l^{r_l n_k}||.
std::vector<DecayReport> check_theorem_conditions(const CriterionInstance& inst,
                                                  std::span<const FiniteMatrix> d_seq,
                                                  std::span<const std::vector<FiniteMatrix>> g_seqs,
                                                  double tol = kDefaultTol, const NormOptions& norm = {});

/// Pointwise convergence on seeds P_m F: ||T_l^{r_l n_k}(P_m F)||,
/// ||T_l^{-r_l n_k}(P_m F)|| and ||T_l^{r_l n_k} T_s^{-r_s n_k}(P_m F)||, each
/// checked against the matching shift-product norm times ||F|| (+1e-8).
/// UFW orientation uses seeds F P_m and right-sided bounds ||P_m X||.
std::vector<DecayReport> check_dhc_criterion_pointwise(const CriterionInstance& inst,
                                                       std::span<const FiniteMatrix> seeds,
                                                       double tol = kDefaultTol, const NormOptions& norm = {});

/// Greedy choice of n_1 < n_2 < ... from [pool_lo, pool_hi] such that every
/// corollary quantity at n_k is below tol * 2^{-k}. nullopt when fewer than
/// target_count values qualify. inst.n_seq and inst.k_max are ignored.
std::optional<std::vector<std::int64_t>> search_subsequence(const CriterionInstance& inst, std::int64_t pool_lo,
                                                            std::int64_t pool_hi, std::size_t target_count,
                                                            double tol = kDefaultTol);

/// Quantity labels, exposed so callers can attach bounds.
std::string label_forward(std::size_t l, const std::string& tail = "P_m");
std::string label_backward(std::size_t l, const std::string& tail = "P_m");
std::string label_cross(std::size_t l, std::size_t s, const std::string& tail = "P_m");
/// head + "W{s}^{-r{s}*n}W{l}^{+r{l}*n}", the right-sided cross product.
std::string label_cross_right(std::size_t l, std::size_t s, const std::string& head = "P_m");

/// (X_1 ... X_k)^* = X_k^* ... X_1^* for shift products.
ShiftProduct adjoint_product(const ShiftProduct& product);

}  // namespace opdyn
