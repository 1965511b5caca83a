#pragma once

// Weak-* functionals phi_A(F) = trace(A F) with finite representers A, the
// dual elementary operators, and the eta_k construction for d-topological
// transitivity of the dual tuple.

#include <cstdint>
#include <span>
#include <vector>

#include "opdyn/constructor.hpp"
#include "opdyn/criteria.hpp"
#include "opdyn/elementary.hpp"
#include "opdyn/opspace.hpp"
#include "opdyn/report.hpp"

namespace opdyn {

struct FunctionalRep {
    FiniteMatrix rep;
};

/// Finite probe set standing in for weak-* neighbourhoods.
struct TestSet {
    std::vector<FiniteMatrix> probes;

    /// {P_j : 0 <= j <= m} followed by every E_{i,j} with i, j in [-m, m].
    static TestSet defaults(std::int64_t m);
};

/// trace(A F) = sum_{p,q} A_{p,q} F_{q,p}.
double eval(const FunctionalRep& phi, const FiniteMatrix& f);

/// M_D phi (F) = phi(D F); representer A D.
FunctionalRep m_d(const FunctionalRep& phi, const FiniteMatrix& d);
/// M_{P_m} phi.
FunctionalRep m_d_projection(const FunctionalRep& phi, std::int64_t m);
/// M_D phi for a shift product D, by transport.
FunctionalRep m_d(const FunctionalRep& phi, const ShiftProduct& d, const Limits& limits = {});

/// (T^p)^* phi, i.e. F -> phi(T^p F). Representer U^p A W^p for WFU
/// orientation and W^p A U^p for UFW.
FunctionalRep dual_apply_power(const ElementaryOp& t, std::int64_t p, const FunctionalRep& phi,
                               const Limits& limits = {});

/// max over probes of |phi(F) - psi(F)|.
double weak_star_distance(const FunctionalRep& phi, const FunctionalRep& psi, const TestSet& probes);

/// eta_k = M_{P_n D_k} psi + sum_l S_l^{* r_l n_k}(M_{P_n G_k^{(l)}} phi_l); n is bundle.m, k 1-based.
FunctionalRep construct_eta(const WitnessBundle& bundle, const FunctionalRep& psi,
                            std::span<const FunctionalRep> phis, const CriterionInstance& inst, std::size_t k);

/// ||P_m * product|| by right transport of P_m and the spectral norm of the
/// result (a row-maximum for these monomial products).
double right_product_norm(std::int64_t m, const ShiftProduct& product, const Limits& limits = {});

/// Strong-convergence proxy: max over basis vectors e_j, j in [-window, window], of ||(D - P) e_j||.
double strong_residual(const FiniteMatrix& d, const FiniteMatrix& p, std::int64_t window);

/// Right-sided sufficient conditions: ||P_m W_l^{r_l n_k}||, ||P_m W_l^{-r_l n_k}||
/// and ||P_m W_s^{-r_s n_k} W_l^{r_l n_k}|| for l != s. Each sample's bound
/// carries the adjoint (primal) value ||(P_m X)^*|| = ||X^* P_m|| computed in
/// log domain; bound_ok requires agreement within 1e-10 relative in logs.
std::vector<DecayReport> check_dual_corollary(const CriterionInstance& inst, double tol = kDefaultTol);

/// Conditions on a dual-side bundle: strong residuals of D_k and G_k^{(l)}
/// against P_n, ||D_k W_l^{r_l n_k}||, ||G_k^{(l)} W_l^{-r_l n_k}|| and
/// ||G_k^{(l)} W_s^{-r_s n_k} W_l^{r_l n_k}||.
std::vector<DecayReport> check_dual_theorem_conditions(const CriterionInstance& inst, const WitnessBundle& bundle,
                                                       double tol = kDefaultTol, const NormOptions& norm = {});

/// Weak-* distances d(eta_k, M_{P_n} psi) and d(T_l^{* r_l n_k} eta_k, M_{P_n} phi_l).
std::vector<DecayReport> verify_eta_convergence(const WitnessBundle& bundle, const FunctionalRep& psi,
                                                std::span<const FunctionalRep> phis, const CriterionInstance& inst,
                                                const TestSet& probes, double tol = kDefaultTol);

}  // namespace opdyn
