#pragma once

// Explicit objects from the characterization of d-hypercyclic tuples:
// witness extraction from approximants and synthesis of the vectors phi_k
// that carry a target tuple.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "opdyn/criteria.hpp"
#include "opdyn/opspace.hpp"
#include "opdyn/report.hpp"

namespace opdyn {

/// D_k and G_k^{(l)} for k = 1..K; g_seqs[l-1][k-1] holds G_k^{(l)}.
struct WitnessBundle {
    std::int64_t m = 0;
    std::vector<std::int64_t> n_seq;
    std::vector<FiniteMatrix> d_seq;
    std::vector<std::vector<FiniteMatrix>> g_seqs;

    std::size_t length() const { return n_seq.size(); }
    /// Throws std::invalid_argument when the sequence lengths disagree.
    void validate() const;
};

/// F (for the open set O) and E_1..E_N (for V_1..V_N); the approximated
/// points are P_m F and P_m E_l.
struct TargetTuple {
    FiniteMatrix f;
    std::vector<FiniteMatrix> e;
    std::int64_t m = 0;
};

/// D_k = G_k^{(l)} = P_m for the instance's n_1..n_K.
WitnessBundle projection_bundle(const CriterionInstance& inst);

/// D_k = F_k P_m and G_k^{(l)} = T_l^{r_l n_k}(F_k) P_m.
WitnessBundle extract_witnesses(std::span<const FiniteMatrix> f_seq, std::span<const std::int64_t> n_seq,
                                const CriterionInstance& inst);

/// phi_k = D_k F + sum_l S_l^{r_l n_k}(G_k^{(l)} E_l), S_l = T_l^{-1}; k is 1-based.
FiniteMatrix construct_phi(const WitnessBundle& bundle, const TargetTuple& targets, const CriterionInstance& inst,
                           std::size_t k);

struct PhiConvergence {
    DecayReport phi_distance;                 ///< ||phi_k - P_m F||, bound = triangle decomposition
    std::vector<DecayReport> image_distance;  ///< ||T_l^{r_l n_k}(phi_k) - P_m E_l|| per l
    std::vector<DecayReport> terms;           ///< the decomposition terms, one report each
    bool triangle_holds = true;               ///< every measured distance <= its decomposition + 1e-8

    std::vector<DecayReport> all_reports() const;
};

PhiConvergence verify_phi_convergence(const WitnessBundle& bundle, const TargetTuple& targets,
                                      const CriterionInstance& inst, double tol = kDefaultTol,
                                      const NormOptions& norm = {});

/// Directory of finmat v1 files (D_0001.finmat, G1_0001.finmat, ...) plus a
/// "manifest.txt" recording m, n_seq and r.
void write_bundle(const std::filesystem::path& dir, const WitnessBundle& bundle, std::span<const std::int64_t> r);
/// Reads a bundle; r receives the recorded exponents.
WitnessBundle read_bundle(const std::filesystem::path& dir, std::vector<std::int64_t>* r = nullptr);

}  // namespace opdyn
