#include "sptmbqc/qcore.hpp"

#include "sptmbqc/parallel.hpp"
#include "sptmbqc/tolerances.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sptmbqc {

namespace {
std::atomic<int> g_jobs{0};
}

int default_jobs() {
    int j = g_jobs.load();
    if (j > 0) return j;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_default_jobs(int jobs) { g_jobs.store(jobs); }

ChainSpec::ChainSpec(std::vector<int> dims) : site_dims(std::move(dims)) {
    if (site_dims.empty()) throw std::invalid_argument("ChainSpec: empty dimension list");
    std::size_t total = 1;
    for (int d : site_dims) {
        if (d < 1) throw std::invalid_argument("ChainSpec: site dimension must be >= 1");
        if (total > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(d))
            throw std::invalid_argument("ChainSpec: total dimension overflows index range");
        total *= static_cast<std::size_t>(d);
    }
}

ChainSpec ChainSpec::mbqc_chain(int n_bulk, int bulk_dim) {
    if (n_bulk < 1) throw std::invalid_argument("mbqc_chain: need at least one bulk site");
    if (bulk_dim < 2) throw std::invalid_argument("mbqc_chain: bulk dimension must be >= 2");
    std::vector<int> dims(static_cast<std::size_t>(n_bulk) + 2, bulk_dim);
    dims.front() = 2;
    dims.back() = 2;
    return ChainSpec(std::move(dims));
}

std::size_t ChainSpec::total_dim() const {
    std::size_t total = 1;
    for (int d : site_dims) total *= static_cast<std::size_t>(d);
    return total;
}

std::size_t ChainSpec::stride(int site) const {
    std::size_t s = 1;
    for (int i = site + 1; i < sites(); ++i) s *= static_cast<std::size_t>(site_dims[i]);
    return s;
}

bool ChainSpec::is_mbqc_chain() const {
    if (sites() < 3) return false;
    if (site_dims.front() != 2 || site_dims.back() != 2) return false;
    int d = site_dims[1];
    if (d < 2) return false;
    for (int i = 1; i + 1 < sites(); ++i)
        if (site_dims[i] != d) return false;
    return true;
}

std::size_t flat_index(const ChainSpec& spec, const std::vector<int>& occupations) {
    if (static_cast<int>(occupations.size()) != spec.sites())
        throw std::invalid_argument("flat_index: wrong number of labels");
    std::size_t idx = 0;
    for (int i = 0; i < spec.sites(); ++i) {
        if (occupations[i] < 0 || occupations[i] >= spec.site_dims[i])
            throw std::out_of_range("flat_index: label out of range at site " + std::to_string(i));
        idx = idx * static_cast<std::size_t>(spec.site_dims[i]) + static_cast<std::size_t>(occupations[i]);
    }
    return idx;
}

double StateVector::norm() const {
    double n2 = 0;
    for (const auto& a : amp) n2 += std::norm(a);
    return std::sqrt(n2);
}

void StateVector::normalize() {
    double n = norm();
    if (n < tol::norm) throw std::runtime_error("StateVector: cannot normalize a (numerically) null state");
    double inv = 1.0 / n;
    for (auto& a : amp) a *= inv;
}

StateVector basis_state(const ChainSpec& spec, const std::vector<int>& occupations) {
    StateVector v(spec);
    v[flat_index(spec, occupations)] = cplx(1, 0);
    return v;
}

cplx inner(const StateVector& a, const StateVector& b) {
    if (!(a.spec == b.spec)) throw std::invalid_argument("inner: chain specs differ");
    cplx s(0, 0);
    for (std::size_t i = 0; i < a.amp.size(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
    return s;
}

OperatorString::OperatorString(std::vector<LocalOperator> fs, cplx c) : coeff(c), factors(std::move(fs)) {
    for (std::size_t i = 0; i + 1 < factors.size(); ++i)
        if (factors[i].site >= factors[i + 1].site)
            throw std::invalid_argument("OperatorString: sites must be strictly increasing");
}

OperatorString OperatorString::adjoint() const {
    OperatorString out;
    out.coeff = std::conj(coeff);
    out.factors.reserve(factors.size());
    for (const auto& f : factors) out.factors.emplace_back(f.site, f.matrix.adjoint());
    return out;
}

OperatorString compose(const OperatorString& a, const OperatorString& b) {
    OperatorString out;
    out.coeff = a.coeff * b.coeff;
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() || j < b.factors.size()) {
        if (j >= b.factors.size() || (i < a.factors.size() && a.factors[i].site < b.factors[j].site)) {
            out.factors.push_back(a.factors[i++]);
        } else if (i >= a.factors.size() || b.factors[j].site < a.factors[i].site) {
            out.factors.push_back(b.factors[j++]);
        } else {
            out.factors.emplace_back(a.factors[i].site, Matrix(a.factors[i].matrix * b.factors[j].matrix));
            ++i;
            ++j;
        }
    }
    return out;
}

void apply_local_inplace(StateVector& state, const LocalOperator& op) {
    const ChainSpec& spec = state.spec;
    if (op.site < 0 || op.site >= spec.sites())
        throw std::invalid_argument("apply_local: site out of range");
    int d = spec.site_dims[op.site];
    if (op.matrix.rows() != d || op.matrix.cols() != d)
        throw std::invalid_argument("apply_local: operator dimension mismatch at site " + std::to_string(op.site));

    std::size_t inner_stride = spec.stride(op.site);
    std::size_t block = inner_stride * static_cast<std::size_t>(d);
    std::size_t nblocks = spec.total_dim() / block;
    cplx* amp = state.amp.data();
    const Matrix& m = op.matrix;

    parallel_chunks(nblocks, [&](std::size_t b0, std::size_t b1, int) {
        std::vector<cplx> buf(d);
        for (std::size_t b = b0; b < b1; ++b) {
            cplx* base = amp + b * block;
            for (std::size_t r = 0; r < inner_stride; ++r) {
                for (int a = 0; a < d; ++a) buf[a] = base[a * inner_stride + r];
                for (int out = 0; out < d; ++out) {
                    cplx acc(0, 0);
                    for (int a = 0; a < d; ++a) acc += m(out, a) * buf[a];
                    base[out * inner_stride + r] = acc;
                }
            }
        }
    });
}

StateVector apply_local(const StateVector& state, const LocalOperator& op) {
    StateVector out = state;
    apply_local_inplace(out, op);
    return out;
}

StateVector apply_string(const StateVector& state, const OperatorString& ops) {
    StateVector out = state;
    for (const auto& f : ops.factors) apply_local_inplace(out, f);
    if (ops.coeff != cplx(1, 0))
        for (auto& a : out.amp) a *= ops.coeff;
    return out;
}

void apply_two_site_inplace(StateVector& state, int site, const Matrix& block) {
    const ChainSpec& spec = state.spec;
    if (site < 0 || site + 1 >= spec.sites())
        throw std::invalid_argument("apply_two_site: site pair out of range");
    int d1 = spec.site_dims[site];
    int d2 = spec.site_dims[site + 1];
    int dd = d1 * d2;
    if (block.rows() != dd || block.cols() != dd)
        throw std::invalid_argument("apply_two_site: block dimension mismatch");

    std::size_t inner_stride = spec.stride(site + 1);
    std::size_t big = inner_stride * static_cast<std::size_t>(dd);
    std::size_t nblocks = spec.total_dim() / big;
    cplx* amp = state.amp.data();

    parallel_chunks(nblocks, [&](std::size_t b0, std::size_t b1, int) {
        std::vector<cplx> buf(dd);
        for (std::size_t b = b0; b < b1; ++b) {
            cplx* base = amp + b * big;
            for (std::size_t r = 0; r < inner_stride; ++r) {
                for (int a = 0; a < dd; ++a) buf[a] = base[a * inner_stride + r];
                for (int out = 0; out < dd; ++out) {
                    cplx acc(0, 0);
                    for (int a = 0; a < dd; ++a) acc += block(out, a) * buf[a];
                    base[out * inner_stride + r] = acc;
                }
            }
        }
    });
}

cplx expectation(const StateVector& state, const OperatorString& ops) {
    StateVector scratch = apply_string(state, ops);
    return inner(state, scratch);
}

SpinOps spin_operators(int dim) {
    SpinOps s;
    if (dim == 2) {
        s.sx = 0.5 * pauli('x');
        s.sy = 0.5 * pauli('y');
        s.sz = 0.5 * pauli('z');
        s.exp_pi_sx = cplx(0, 1) * pauli('x');
        s.exp_pi_sy = cplx(0, 1) * pauli('y');
        s.exp_pi_sz = cplx(0, 1) * pauli('z');
    } else if (dim == 3) {
        double r = 1.0 / std::sqrt(2.0);
        s.sx = Matrix::Zero(3, 3);
        s.sx << 0, r, 0, r, 0, r, 0, r, 0;
        s.sy = Matrix::Zero(3, 3);
        s.sy << 0, cplx(0, -r), 0, cplx(0, r), 0, cplx(0, -r), 0, cplx(0, r), 0;
        s.sz = Matrix::Zero(3, 3);
        s.sz(0, 0) = 1;
        s.sz(2, 2) = -1;
        // For spin 1 the eigenvalues of S^alpha are {-1,0,1}, so
        // e^{i pi S} = I - 2 S^2 exactly (entries stay rational).
        Matrix id = Matrix::Identity(3, 3);
        s.exp_pi_sx = id - 2.0 * (s.sx * s.sx);
        s.exp_pi_sy = id - 2.0 * (s.sy * s.sy);
        s.exp_pi_sz = id - 2.0 * (s.sz * s.sz);
    } else {
        throw std::invalid_argument("spin_operators: unsupported dimension " + std::to_string(dim));
    }
    return s;
}

Matrix pauli(char axis) {
    Matrix m = Matrix::Zero(2, 2);
    switch (axis) {
        case 'x': m(0, 1) = 1; m(1, 0) = 1; break;
        case 'y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
        case 'z': m(0, 0) = 1; m(1, 1) = -1; break;
        case 'i': m(0, 0) = 1; m(1, 1) = 1; break;
        default: throw std::invalid_argument("pauli: unknown axis");
    }
    return m;
}

int axis_index(char axis) {
    switch (axis) {
        case 'x': return 0;
        case 'y': return 1;
        case 'z': return 2;
        default: throw std::invalid_argument("axis_index: unknown axis");
    }
}

Matrix triplet_projector() {
    // (3 + sigma.sigma)/4 on 2x2: sigma.sigma = -3 on the singlet, +1 on triplets.
    Matrix p = 3.0 * Matrix::Identity(4, 4);
    for (char ax : kAxes) {
        Matrix s = pauli(ax);
        Matrix ss = Matrix::Zero(4, 4);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    for (int d = 0; d < 2; ++d) ss(a * 2 + c, b * 2 + d) = s(a, b) * s(c, d);
        p += ss;
    }
    return 0.25 * p;
}

Matrix spin2_projector() {
    // With X = S1.S2 on 3x3: X = -2, -1, +1 on total spin 0, 1, 2.
    // P2 = (X + 2)(X + 1)/6 selects the spin-2 sector.
    SpinOps s = spin_operators(3);
    Matrix x = Matrix::Zero(9, 9);
    const Matrix* ops[3][2] = {{&s.sx, &s.sx}, {&s.sy, &s.sy}, {&s.sz, &s.sz}};
    for (auto& pair : ops) {
        const Matrix& a = *pair[0];
        const Matrix& b = *pair[1];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) x(i * 3 + k, j * 3 + l) += a(i, j) * b(k, l);
    }
    Matrix id = Matrix::Identity(9, 9);
    return (x + 2.0 * id) * (x + id) / 6.0;
}

Matrix triplet_isometry() {
    Matrix k = Matrix::Zero(3, 4);
    double r = 1.0 / std::sqrt(2.0);
    k(0, 0) = 1;          // |m=+1> <- |00>
    k(1, 1) = r;          // |m=0>  <- (|01> + |10>)/sqrt(2)
    k(1, 2) = r;
    k(2, 3) = 1;          // |m=-1> <- |11>
    return k;
}

Matrix dense_matrix(const ChainSpec& spec, const OperatorString& ops) {
    std::size_t dim = spec.total_dim();
    if (dim > 4096) throw std::invalid_argument("dense_matrix: chain too large to materialize");
    Matrix full = Matrix::Identity(1, 1);
    std::size_t fi = 0;
    for (int site = 0; site < spec.sites(); ++site) {
        Matrix factor;
        if (fi < ops.factors.size() && ops.factors[fi].site == site) {
            factor = ops.factors[fi].matrix;
            ++fi;
        } else {
            factor = Matrix::Identity(spec.site_dims[site], spec.site_dims[site]);
        }
        Matrix next(full.rows() * factor.rows(), full.cols() * factor.cols());
        for (Eigen::Index a = 0; a < full.rows(); ++a)
            for (Eigen::Index b = 0; b < full.cols(); ++b)
                next.block(a * factor.rows(), b * factor.cols(), factor.rows(), factor.cols()) =
                    full(a, b) * factor;
        full = std::move(next);
    }
    return ops.coeff * full;
}

} // namespace sptmbqc
