#pragma once

#include "sptmbqc/qcore.hpp"
#include "sptmbqc/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sptmbqc {

// Elements of G = (Z_2)^m as bit-vectors; group law is XOR, identity 0.
// Element order in vectors, matrices and reports is ascending bit pattern,
// bit t = generator t.
using GroupElement = std::uint32_t;

// Sum of scalar-weighted operator strings; closed under products, which is
// what keeps the M_k bookkeeping away from full-dimension matrices.
struct OperatorSum {
    std::vector<OperatorString> terms;

    static OperatorSum zero() { return {}; }
    static OperatorSum identity();
    bool empty() const { return terms.empty(); }
};

OperatorSum sum_compose(const OperatorSum& a, const OperatorSum& b); // a*b, b first
OperatorSum sum_add(const OperatorSum& a, const OperatorSum& b);
OperatorSum sum_scale(const OperatorSum& a, cplx c);
cplx sum_expectation(const StateVector& state, const OperatorSum& a);
StateVector sum_apply(const StateVector& state, const OperatorSum& a);
Matrix sum_dense(const ChainSpec& spec, const OperatorSum& a);

struct RepresentationBundle {
    int m = 0;        // G = (Z2)^m
    ChainSpec spec;   // (2, d, ..., d, 2)
    std::vector<Matrix> u0;     // linear rep at block 0
    std::vector<Matrix> u_bulk; // linear rep at bulk blocks (uniform)
    std::vector<Matrix> s_bulk; // S_i(g), the gate generators
    std::vector<Matrix> v_r0;   // projective rep at block 0
    std::vector<Matrix> v_l;    // projective rep at block N+1 (phase-fixed on finalize)
    std::vector<std::uint32_t> gate_mask; // per bulk site: bit g set iff g in G_i

    // filled by finalize_bundle
    std::vector<int> kappa;          // |G|x|G| row-major, values 0/1
    std::uint32_t h_mask = 0;        // members of the subgroup H
    std::vector<cplx> tbar_phase;    // Tbar(g)Tbar(g') = phase * Tbar(g xor g')
    std::vector<std::string> labels; // element names for reports

    int order() const { return 1 << m; }
    int kappa_at(GroupElement g, GroupElement gp) const { return kappa[g * order() + gp]; }
    cplx phase_at(GroupElement g, GroupElement gp) const { return tbar_phase[g * order() + gp]; }
    bool in_h(GroupElement g) const { return (h_mask >> g) & 1u; }
    bool gate_allowed(int site, GroupElement g) const { return (gate_mask.at(site - 1) >> g) & 1u; }
};

// Structural validation + derived data: hermiticity/involution checks,
// kappa from the commutation relations of v (inconsistent pairs throw),
// v_l rescaled so Tbar(g)^2 = I, the Tbar phase table, and H as the
// maximal v-commuting subgroup on which u0(h) = v_R0(h).
void finalize_bundle(RepresentationBundle& bundle);

// The spin-1 instantiation: u_k = e^{i pi S^a}, S_k = S^a, v = sigma^a,
// u0(x-rot) = X, u0(z-rot) = I, G_i = G. Finalized.
RepresentationBundle spin1_bundle(int n_bulk);

// kappa(g,g') computed from the stored table (bundle must be finalized).
int kappa(const RepresentationBundle& bundle, GroupElement g, GroupElement gp);

// U(g) = v_R0(g) (prod_i u_i(g)) v_L(g), the chain symmetry of the bundle.
OperatorString bundle_symmetry_op(const RepresentationBundle& bundle, GroupElement g);

// chi(g) from U(g)|Psi> = (-1)^{chi(g)}|Psi>; throws if the state is not
// symmetric within tol.
std::vector<int> bundle_chi(const RepresentationBundle& bundle, const StateVector& state,
                            double tolerance = 1e-8);

struct LogicalOperator {
    GroupElement g = 0;
    OperatorString op; // (tensor_i u_i(g)) v_L(g)
};

LogicalOperator tbar(const RepresentationBundle& bundle, GroupElement g);

struct LogicalSubspace {
    std::vector<StateVector> basis; // orthonormal, basis[0] = |Psi>
    int dim = 0;
    bool rank_ambiguous = false;    // singular value fell in [1e-10, 1e-6]
    bool degenerate = false;        // dim < |G| / |H|
};

LogicalSubspace logical_subspace(const RepresentationBundle& bundle, const StateVector& state);

// Tbar(g) compressed to the logical basis.
Matrix project_tbar(const RepresentationBundle& bundle, const LogicalSubspace& q, GroupElement g);

struct GateSpec {
    int site = 1;        // bulk site k
    GroupElement g = 0;  // g_k
    double alpha = 0;    // alpha_k
};

struct LkRkBeta {
    OperatorString l_k;          // (tensor_{i<k} u_i(g)) S_k(g)
    OperatorString sin_beta_r_k; // sin(S_k(g) a) u_k(g) (tensor_{i>k} u_i(g)) v_L(g)
    double beta = 0;             // arccos <Psi| cos(S_k(g) a) |Psi>
    double sigma = 0;            // <Psi| R_k |Psi>
    double nu = 0;               // <Psi| S_k(g) u_k(g) (tensor_{i>k} u_i(g)) v_L(g) |Psi>
    bool r_defined = true;       // false when sin(beta) ~ 0 with alpha != 0
};

LkRkBeta lk_rk_beta(const RepresentationBundle& bundle, const StateVector& state,
                    const GateSpec& gate);

// |G| x |G| operator-valued transfer matrix of one measurement block:
// row g' is the identity when kappa(g_k, g') = 0, otherwise
// cos(S_k(g_k) a_k) [g'] + i phase(g_k,g') sin(S_k(g_k) a_k) u_k ... v_L [g_k g'].
struct MkMatrix {
    GateSpec gate;
    int order = 0;
    std::vector<OperatorSum> entries; // row-major |G| x |G|

    const OperatorSum& at(GroupElement row, GroupElement col) const {
        return entries[row * order + col];
    }
};

MkMatrix mk_matrix(const RepresentationBundle& bundle, const GateSpec& gate);
MkMatrix mk_multiply(const MkMatrix& later, const MkMatrix& earlier);

// V_k = exp(-i alpha/2 L_k(g_k)) applied to the state (two string applications).
StateVector apply_gate(const RepresentationBundle& bundle, const StateVector& state,
                       const GateSpec& gate);

struct EvolvedExpectations {
    std::vector<cplx> via_mk;          // <Psi| prod_k M_k |Psi> . init vector
    std::vector<cplx> via_conjugation; // <Psi_t| Tbar(g) |Psi_t>
    double route_mismatch = 0;         // max |difference|, asserted < 1e-10
};

EvolvedExpectations evolved_expectations(const RepresentationBundle& bundle,
                                         const StateVector& state,
                                         const std::vector<GateSpec>& gates);

// One tilted-basis block as a logical channel:
// rho -> (1+sigma)/2 V rho V^+ + (1-sigma)/2 V^+ rho V, V = P e^{-i beta Tbar/2} P.
Matrix cptp_apply(const RepresentationBundle& bundle, const StateVector& state,
                  const LogicalSubspace& q, const Matrix& rho, const GateSpec& gate);

// Trace distance between n composed channels at angle alpha/n (sites cycled
// from `sites`) and the target unitary rotation by nu(g)*alpha, on the
// logical state |Psi><Psi|.
double unitarity_scaling(const RepresentationBundle& bundle, const StateVector& state,
                         GroupElement g, double alpha, int n, const std::vector<int>& sites,
                         int d_min = 0);

struct BlockLocalRound {
    std::vector<std::uint32_t> gen_outcomes; // blocks 0..N: bit t = s_i(gen_t)
    int s_last = 0;                          // outcome of v_L(h) at block N+1
    int total_sign = 1;                      // (-1)^{sum_i s_i(h)}
    double probability = 0;
};

// Adaptive block-local measurement of Tbar_N(h): block 0 measures the joint
// u0 eigenbasis, block k measures O_k(g) = W_k u_k(g) W_k^+ with
// W_k = exp(-i alpha_k/2 (-1)^{q_{k-1}(g_k)} S_k(g_k)), q running over the
// outcomes of blocks 0..k-1, then v_L(h) at block N+1.
BlockLocalRound block_local_measure(const RepresentationBundle& bundle, const StateVector& state,
                                    GroupElement h, const std::vector<GateSpec>& gates,
                                    CounterRng& rng);

struct BlockLocalDistribution {
    double p_plus = 0;  // probability of total sign +1
    double p_minus = 0;
    std::size_t branches = 0;
};

// Exact enumeration of every outcome branch (small chains).
BlockLocalDistribution block_local_distribution(const RepresentationBundle& bundle,
                                                const StateVector& state, GroupElement h,
                                                const std::vector<GateSpec>& gates);

struct CheckResult {
    std::string name;
    double residual = 0;
    bool pass = false;
    std::string note;
};

// Full condition/lemma report: representation conditions, Lemma 4 relations,
// Lemma 5 conjugation identity, the projection scalar identity, the
// commutation and product identities behind the block-local protocol, and
// simultaneous measurability. Report-only; never throws on failures.
std::vector<CheckResult> verify_bundle(const RepresentationBundle& bundle,
                                       const StateVector& state,
                                       const std::vector<GateSpec>& gates = {});

} // namespace sptmbqc
