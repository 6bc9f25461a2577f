#include "sptmbqc/states.hpp"

#include "sptmbqc/parallel.hpp"
#include "sptmbqc/rng.hpp"
#include "sptmbqc/tolerances.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sptmbqc {

namespace {

Matrix kron2(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Heisenberg coupling between a dim-da and dim-db site: sum_a A^a x B^a.
Matrix coupling_block(const Matrix& ax, const Matrix& ay, const Matrix& az,
                      const Matrix& bx, const Matrix& by, const Matrix& bz) {
    return kron2(ax, bx) + kron2(ay, by) + kron2(az, bz);
}

// Contract two adjacent dim-2 factors of a raw multi-qubit vector into one
// dim-3 factor through the given 3x4 isometry.
void contract_pair(std::vector<cplx>& amp, std::vector<int>& dims, int pos, const Matrix& iso) {
    std::size_t left = 1, right = 1;
    for (int i = 0; i < pos; ++i) left *= static_cast<std::size_t>(dims[i]);
    for (std::size_t i = pos + 2; i < dims.size(); ++i) right *= static_cast<std::size_t>(dims[i]);
    std::vector<cplx> out(left * 3 * right);
    for (std::size_t l = 0; l < left; ++l)
        for (int m = 0; m < 3; ++m)
            for (std::size_t r = 0; r < right; ++r) {
                cplx acc(0, 0);
                for (int ab = 0; ab < 4; ++ab) {
                    if (iso(m, ab) == cplx(0, 0)) continue;
                    acc += iso(m, ab) * amp[(l * 4 + ab) * right + r];
                }
                out[(l * 3 + m) * right + r] = acc;
            }
    amp = std::move(out);
    dims.erase(dims.begin() + pos);
    dims[pos] = 3;
}

} // namespace

OperatorString chain_symmetry_op(const ChainSpec& spec, char axis) {
    if (!spec.is_mbqc_chain())
        throw std::invalid_argument("chain_symmetry_op: not an MBQC chain layout");
    SpinOps bulk = spin_operators(spec.site_dims[1]);
    const Matrix& e = axis == 'x' ? bulk.exp_pi_sx : axis == 'y' ? bulk.exp_pi_sy : bulk.exp_pi_sz;
    std::vector<LocalOperator> factors;
    factors.emplace_back(0, pauli(axis));
    for (int j = 1; j <= spec.n_bulk(); ++j) factors.emplace_back(j, e);
    factors.emplace_back(spec.sites() - 1, pauli(axis));
    return OperatorString(std::move(factors), cplx(-1, 0));
}

StateVector build_aklt_prime(int n_bulk) {
    if (n_bulk < 1) throw std::invalid_argument("build_aklt_prime: N >= 1 required");
    if (n_bulk > 12) throw std::invalid_argument("build_aklt_prime: N too large for memory budget");

    // 2N+2 virtual qubits; singlets on consecutive pairs
    // (0,1L), (1R,2L), ..., (NR, N+1).
    int nq = 2 * n_bulk + 2;
    std::vector<cplx> amp = {cplx(1, 0)};
    double r = 1.0 / std::sqrt(2.0);
    for (int p = 0; p < nq / 2; ++p) {
        std::vector<cplx> next(amp.size() * 4, cplx(0, 0));
        for (std::size_t i = 0; i < amp.size(); ++i) {
            next[i * 4 + 1] = amp[i] * r;   // |01>
            next[i * 4 + 2] = -amp[i] * r;  // -|10>
        }
        amp = std::move(next);
    }

    std::vector<int> dims(nq, 2);
    Matrix iso = triplet_isometry();
    // Bulk site i starts at virtual position 2i-1; each contraction to its
    // left removes one slot, so by the time we reach site i it sits at i.
    for (int i = 1; i <= n_bulk; ++i) contract_pair(amp, dims, i, iso);

    StateVector state(ChainSpec::mbqc_chain(n_bulk));
    if (state.amp.size() != amp.size()) throw std::logic_error("build_aklt_prime: dimension bookkeeping error");
    state.amp = std::move(amp);
    state.normalize();
    return state;
}

SparseHamiltonian build_hamiltonian(const HamiltonianParams& params) {
    if (params.n_bulk < 1) throw std::invalid_argument("build_hamiltonian: N >= 1 required");
    if (params.j_left <= 0 || params.j_right <= 0)
        throw std::invalid_argument("build_hamiltonian: boundary couplings must be positive");

    int n = params.n_bulk;
    SparseHamiltonian h;
    h.spec = ChainSpec::mbqc_chain(n);

    SpinOps q = spin_operators(2); // boundary spin-1/2 (S = sigma/2)
    SpinOps s = spin_operators(3);

    Matrix ss = coupling_block(s.sx, s.sy, s.sz, s.sx, s.sy, s.sz); // S_i . S_{i+1}
    Matrix bulk_bond;
    if (params.aklt) {
        bulk_bond = 0.5 * ss + (ss * ss) / 6.0 + Matrix::Identity(9, 9) / 6.0;
    } else {
        bulk_bond = std::cos(params.theta) * ss + std::sin(params.theta) * (ss * ss);
    }
    for (int i = 1; i <= n - 1; ++i) h.bond_terms.emplace_back(i, bulk_bond);

    if (!params.aklt && (params.d_x != 0.0 || params.d_z != 0.0)) {
        Matrix aniso = params.d_x * (s.sx * s.sx) + params.d_z * (s.sz * s.sz);
        for (int i = 1; i <= n - 1; ++i) h.site_terms.emplace_back(i, aniso);
    }

    // sigma_0 . S_1 and S_N . sigma_{N+1}; sigma = 2S on the boundary qubits.
    Matrix left = coupling_block(2 * q.sx, 2 * q.sy, 2 * q.sz, s.sx, s.sy, s.sz);
    Matrix right = coupling_block(s.sx, s.sy, s.sz, 2 * q.sx, 2 * q.sy, 2 * q.sz);
    h.bond_terms.emplace_back(0, params.j_left * left);
    h.bond_terms.emplace_back(n, params.j_right * right);
    return h;
}

void SparseHamiltonian::apply(const StateVector& x, StateVector& y) const {
    if (!(x.spec == spec)) throw std::invalid_argument("SparseHamiltonian::apply: spec mismatch");
    y.spec = spec;
    y.amp.assign(x.amp.size(), cplx(0, 0));
    StateVector scratch = x;
    for (const auto& [site, block] : bond_terms) {
        scratch.amp = x.amp;
        apply_two_site_inplace(scratch, site, block);
        for (std::size_t i = 0; i < y.amp.size(); ++i) y.amp[i] += scratch.amp[i];
    }
    for (const auto& [site, block] : site_terms) {
        scratch.amp = x.amp;
        apply_local_inplace(scratch, LocalOperator(site, block));
        for (std::size_t i = 0; i < y.amp.size(); ++i) y.amp[i] += scratch.amp[i];
    }
}

StateVector SparseHamiltonian::apply(const StateVector& x) const {
    StateVector y;
    apply(x, y);
    return y;
}

Matrix SparseHamiltonian::dense() const {
    std::size_t dim = spec.total_dim();
    if (dim > 4096) throw std::invalid_argument("SparseHamiltonian::dense: dimension too large");
    Matrix h = Matrix::Zero(dim, dim);
    StateVector basis(spec), out;
    for (std::size_t j = 0; j < dim; ++j) {
        std::fill(basis.amp.begin(), basis.amp.end(), cplx(0, 0));
        basis.amp[j] = cplx(1, 0);
        apply(basis, out);
        for (std::size_t i = 0; i < dim; ++i) h(i, j) = out.amp[i];
    }
    return h;
}

namespace {

GroundStateResult dense_ground_state(const SparseHamiltonian& h) {
    Matrix hd = h.dense();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hd);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("ground_state: dense eigensolver failed");
    GroundStateResult res;
    res.energy = solver.eigenvalues()(0);
    res.gap = h.spec.total_dim() > 1 ? solver.eigenvalues()(1) - solver.eigenvalues()(0) : 0.0;
    res.state = StateVector(h.spec);
    Vector v = solver.eigenvectors().col(0);
    for (std::size_t i = 0; i < res.state.amp.size(); ++i) res.state.amp[i] = v(i);
    res.state.normalize();
    StateVector hv = h.apply(res.state);
    double r2 = 0;
    for (std::size_t i = 0; i < hv.amp.size(); ++i) r2 += std::norm(hv.amp[i] - res.energy * res.state.amp[i]);
    res.residual = std::sqrt(r2);
    res.iterations = 0;
    return res;
}

GroundStateResult lanczos_ground_state(const SparseHamiltonian& h, double tol_res, int max_iter) {
    std::size_t dim = h.spec.total_dim();
    // All-ones start plus a small deterministic perturbation so the seed is
    // never exactly orthogonal to a symmetry sector.
    StateVector v0(h.spec);
    CounterRng rng(0x5eedu, 17);
    for (std::size_t i = 0; i < dim; ++i)
        v0.amp[i] = cplx(1.0 + 0.01 * (rng.uniform() - 0.5), 0.01 * (rng.uniform() - 0.5));
    v0.normalize();

    std::vector<StateVector> basis;
    std::vector<double> alpha, beta; // tridiagonal coefficients
    basis.push_back(v0);
    StateVector w;
    GroundStateResult res;
    res.state = v0;

    int m_cap = std::min<int>(max_iter, static_cast<int>(dim));
    for (int m = 1; m <= m_cap; ++m) {
        const StateVector& v = basis.back();
        h.apply(v, w);
        cplx a = inner(v, w);
        alpha.push_back(a.real());
        for (std::size_t i = 0; i < dim; ++i) w.amp[i] -= a * v.amp[i];
        if (basis.size() > 1) {
            const StateVector& prev = basis[basis.size() - 2];
            for (std::size_t i = 0; i < dim; ++i) w.amp[i] -= beta.back() * prev.amp[i];
        }
        // full reorthogonalization
        for (const auto& b : basis) {
            cplx ov = inner(b, w);
            if (std::abs(ov) > 0)
                for (std::size_t i = 0; i < dim; ++i) w.amp[i] -= ov * b.amp[i];
        }

        double b = 0;
        for (std::size_t i = 0; i < dim; ++i) b += std::norm(w.amp[i]);
        b = std::sqrt(b);
        bool exhausted = b < 1e-14; // Krylov space exhausted: tridiagonal spectrum is exact

        // Ritz values/vectors of the current tridiagonal every few steps.
        bool check = (m >= 8 && m % 4 == 0) || m == m_cap || exhausted;
        if (check) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                t(i, i) = alpha[i];
                if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ts(t);
            Eigen::VectorXd y0 = ts.eigenvectors().col(0);
            StateVector ritz(h.spec);
            for (int i = 0; i < m; ++i)
                for (std::size_t k = 0; k < dim; ++k) ritz.amp[k] += y0(i) * basis[i].amp[k];
            ritz.normalize();
            StateVector hr = h.apply(ritz);
            double e0 = ts.eigenvalues()(0);
            double r2 = 0;
            for (std::size_t k = 0; k < dim; ++k) r2 += std::norm(hr.amp[k] - e0 * ritz.amp[k]);
            double resid = std::sqrt(r2);
            if (resid < tol_res || m == m_cap || exhausted) {
                res.energy = e0;
                res.gap = m > 1 ? ts.eigenvalues()(1) - e0 : 0.0;
                res.state = std::move(ritz);
                res.residual = resid;
                res.iterations = m;
                if (resid >= tol_res)
                    throw std::runtime_error(
                        "ground_state: Lanczos did not converge after " + std::to_string(m) +
                        " iterations, residual " + std::to_string(resid));
                return res;
            }
        }

        beta.push_back(b);
        for (std::size_t i = 0; i < dim; ++i) w.amp[i] /= b;
        basis.push_back(w);
    }
    throw std::runtime_error("ground_state: Lanczos iteration cap reached without convergence");
}

} // namespace

GroundStateResult ground_state(const SparseHamiltonian& h, double residual_tol, int max_iterations) {
    GroundStateResult res = h.spec.total_dim() <= 4096 ? dense_ground_state(h)
                                                       : lanczos_ground_state(h, residual_tol, max_iterations);
    if (res.residual >= residual_tol)
        throw std::runtime_error("ground_state: residual " + std::to_string(res.residual) +
                                 " above tolerance");
    res.degenerate_warning = res.gap < 1e-6;
    return res;
}

SymmetryReport symmetry_residuals(const StateVector& state) {
    SymmetryReport rep;
    for (int a = 0; a < 3; ++a) {
        OperatorString u = chain_symmetry_op(state.spec, kAxes[a]);
        StateVector w = apply_string(state, u);
        cplx ev = inner(state, w);
        double r2 = 0;
        for (std::size_t i = 0; i < w.amp.size(); ++i) r2 += std::norm(w.amp[i] - ev * state.amp[i]);
        rep.residual[a] = std::sqrt(r2);
        rep.expectation[a] = ev.real();
        rep.sign[a] = std::abs(ev.real() - 1.0) < 0.5 ? 1 : (std::abs(ev.real() + 1.0) < 0.5 ? -1 : 0);
    }
    return rep;
}

void save_state(const StateVector& state, const std::string& path) {
    if (!state.spec.is_mbqc_chain())
        throw std::invalid_argument("save_state: only MBQC chain layouts are cached");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_state: cannot open " + path);
    const char magic[8] = {'S', 'P', 'T', 'M', 'B', 'Q', 'C', '1'};
    out.write(magic, 8);
    std::uint64_t n = static_cast<std::uint64_t>(state.spec.n_bulk());
    std::uint64_t d = static_cast<std::uint64_t>(state.spec.site_dims[1]);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&d), 8);
    for (const auto& a : state.amp) {
        double re = a.real(), im = a.imag();
        out.write(reinterpret_cast<const char*>(&re), 8);
        out.write(reinterpret_cast<const char*>(&im), 8);
    }
    if (!out) throw std::runtime_error("save_state: write failed for " + path);
}

StateVector load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_state: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "SPTMBQC1", 8) != 0)
        throw std::runtime_error("load_state: bad magic in " + path);
    std::uint64_t n = 0, d = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&d), 8);
    if (!in || n < 1 || n > 16 || d < 2 || d > 8)
        throw std::runtime_error("load_state: implausible header in " + path);
    StateVector state(ChainSpec::mbqc_chain(static_cast<int>(n), static_cast<int>(d)));
    for (auto& a : state.amp) {
        double re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), 8);
        in.read(reinterpret_cast<char*>(&im), 8);
        a = cplx(re, im);
    }
    if (!in) throw std::runtime_error("load_state: truncated file " + path);
    return state;
}

} // namespace sptmbqc
