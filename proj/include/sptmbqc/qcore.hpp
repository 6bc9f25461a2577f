#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace sptmbqc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Chain layout: an ordered list of local dimensions. The MBQC resource
// chains look like (2, d, d, ..., d, 2) with N bulk sites, but the machinery
// below works for any dimension list (single-site toys included).
struct ChainSpec {
    std::vector<int> site_dims;

    ChainSpec() = default;
    explicit ChainSpec(std::vector<int> dims);
    // Standard MBQC chain: boundary qubits + N bulk sites of dimension d.
    static ChainSpec mbqc_chain(int n_bulk, int bulk_dim = 3);

    int sites() const { return static_cast<int>(site_dims.size()); }
    // Bulk site count for an MBQC chain (sites() - 2).
    int n_bulk() const { return sites() - 2; }
    std::size_t total_dim() const;
    // Row-major strides, site 0 most significant.
    std::size_t stride(int site) const;
    bool is_mbqc_chain() const;
    bool operator==(const ChainSpec& other) const { return site_dims == other.site_dims; }
};

// Row-major flat index, site 0 most significant. Throws on out-of-range labels.
std::size_t flat_index(const ChainSpec& spec, const std::vector<int>& occupations);

struct StateVector {
    ChainSpec spec;
    std::vector<cplx> amp;

    StateVector() = default;
    explicit StateVector(ChainSpec s) : spec(std::move(s)), amp(spec.total_dim(), cplx(0, 0)) {}

    double norm() const;
    void normalize();
    cplx& operator[](std::size_t i) { return amp[i]; }
    const cplx& operator[](std::size_t i) const { return amp[i]; }
};

StateVector basis_state(const ChainSpec& spec, const std::vector<int>& occupations);
cplx inner(const StateVector& a, const StateVector& b); // <a|b>

struct LocalOperator {
    int site = 0;
    Matrix matrix;

    LocalOperator() = default;
    LocalOperator(int s, Matrix m) : site(s), matrix(std::move(m)) {}
};

// Product of single-site operators, at most one per site, sites strictly
// increasing. A scalar prefactor keeps things like -sigma^z exact.
struct OperatorString {
    cplx coeff{1.0, 0.0};
    std::vector<LocalOperator> factors;

    OperatorString() = default;
    explicit OperatorString(std::vector<LocalOperator> fs, cplx c = cplx(1, 0));

    bool is_identity() const { return factors.empty(); }
    OperatorString adjoint() const;
};

// a * b as operators (b acts first). Same-site factors are merged.
OperatorString compose(const OperatorString& a, const OperatorString& b);

// (I x ... x op x ... x I)|state>, unnormalized output permitted.
StateVector apply_local(const StateVector& state, const LocalOperator& op);
void apply_local_inplace(StateVector& state, const LocalOperator& op);
StateVector apply_string(const StateVector& state, const OperatorString& ops);

// Dense two-site block acting on adjacent sites (site, site+1).
void apply_two_site_inplace(StateVector& state, int site, const Matrix& block);

// <state| ops |state>. State must be normalized for the usual reading.
cplx expectation(const StateVector& state, const OperatorString& ops);

// Spin operator zoo for dim 2 (spin-1/2, S = sigma/2) and dim 3 (spin-1).
struct SpinOps {
    Matrix sx, sy, sz;             // spin operators
    Matrix exp_pi_sx, exp_pi_sy, exp_pi_sz; // e^{i pi S^alpha}
};
SpinOps spin_operators(int dim);

// Pauli matrices (dim 2 convenience, sigma = 2S).
Matrix pauli(char axis); // 'x', 'y', 'z' or 'i' for identity

// axis index <-> char helpers used across modules
inline constexpr char kAxes[3] = {'x', 'y', 'z'};
int axis_index(char axis);

// P^{(1)}: triplet projector on 2x2; P^{(2)}: spin-2 projector on 3x3.
Matrix triplet_projector();
Matrix spin2_projector();

// Isometry from two virtual qubits onto the spin-1 triplet, rows ordered
// (m=+1, m=0, m=-1), columns (00, 01, 10, 11).
Matrix triplet_isometry();

// Dense matrix of an operator string on the full chain (small chains only).
Matrix dense_matrix(const ChainSpec& spec, const OperatorString& ops);

} // namespace sptmbqc
