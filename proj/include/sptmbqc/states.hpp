#pragma once

#include "sptmbqc/qcore.hpp"

#include <array>
#include <optional>
#include <string>

namespace sptmbqc {

struct HamiltonianParams {
    int n_bulk = 4;
    double theta = 0.0;
    double d_x = 0.0;
    double d_z = 0.0;
    double j_left = 1.0;   // J_0
    double j_right = 1.0;  // J_{N+1}
    // Emit the AKLT bulk with exact rational coefficients 1/2, 1/6, 1/6
    // instead of theta = arctan(1/3), so the projector identity is exact.
    bool aklt = false;
};

// Nearest-neighbour bond blocks plus single-site blocks, applied by strided
// sweeps. Full-dimension matrices are only ever formed in the dense
// eigensolver path.
struct SparseHamiltonian {
    ChainSpec spec;
    std::vector<std::pair<int, Matrix>> bond_terms; // (left site, (d1*d2)^2 block)
    std::vector<std::pair<int, Matrix>> site_terms; // (site, d^2 block)

    void apply(const StateVector& x, StateVector& y) const; // y = H x
    StateVector apply(const StateVector& x) const;
    Matrix dense() const; // small chains only
};

struct GroundStateResult {
    double energy = 0;
    StateVector state;
    double gap = 0;
    double residual = 0;
    int iterations = 0;
    bool degenerate_warning = false; // gap below 1e-6: unusable as MBQC resource
};

struct SymmetryReport {
    std::array<double, 3> residual{};            // ||U_a|psi> - <U_a>|psi>|| per axis
    std::array<double, 3> expectation{};         // Re <psi|U_a|psi>
    std::array<int, 3> sign{};                   // expectation rounded to +-1 (0 if not close)
};

// The chain symmetry operator U_alpha = -sigma_0^a (Prod_j e^{i pi S_j^a}) sigma_{N+1}^a.
OperatorString chain_symmetry_op(const ChainSpec& spec, char axis);

// Boundary-decorated AKLT state built from 2(N+1) virtual qubits in singlets,
// bulk pairs mapped through the triplet isometry, normalized once at the end.
StateVector build_aklt_prime(int n_bulk);

SparseHamiltonian build_hamiltonian(const HamiltonianParams& params);

// Lowest eigenpair plus the gap E1 - E0. Dense solver for dim <= 4096,
// Lanczos with full reorthogonalization otherwise.
GroundStateResult ground_state(const SparseHamiltonian& h,
                               double residual_tol = 1e-9,
                               int max_iterations = 600);

SymmetryReport symmetry_residuals(const StateVector& state);

// Binary state cache: magic "SPTMBQC1", u64 N, u64 bulk dim, then
// little-endian f64 (re, im) pairs.
void save_state(const StateVector& state, const std::string& path);
StateVector load_state(const std::string& path);

} // namespace sptmbqc
