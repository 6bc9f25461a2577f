#include "sptmbqc/mbqc.hpp"

#include "sptmbqc/parallel.hpp"
#include "sptmbqc/tolerances.hpp"

#include <cmath>
#include <stdexcept>

namespace sptmbqc {

namespace {

// Project the leading site of `amp` (dimension d, remaining block `rest`)
// onto `ket`, writing the unnormalized tail into `out`. Returns ||out||^2,
// i.e. the Born weight of the branch relative to ||amp||^2.
double project_leading(const std::vector<cplx>& amp, int d, std::size_t rest,
                       const Vector& ket, std::vector<cplx>& out) {
    out.assign(rest, cplx(0, 0));
    for (int a = 0; a < d; ++a) {
        cplx c = std::conj(ket(a));
        if (c == cplx(0, 0)) continue;
        const cplx* base = amp.data() + static_cast<std::size_t>(a) * rest;
        for (std::size_t r = 0; r < rest; ++r) out[r] += c * base[r];
    }
    double w = 0;
    for (const auto& v : out) w += std::norm(v);
    return w;
}

// +1/-1 eigenvectors of sigma^axis, outcome bit 0 -> eigenvalue +1.
std::array<Vector, 2> qubit_axis_basis(char axis) {
    std::array<Vector, 2> b;
    b[0] = Vector(2);
    b[1] = Vector(2);
    double r = 1.0 / std::sqrt(2.0);
    switch (axis) {
        case 'x': b[0] << r, r; b[1] << r, -r; break;
        case 'y': b[0] << r, cplx(0, r); b[1] << r, cplx(0, -r); break;
        case 'z': b[0] << 1, 0; b[1] << 0, 1; break;
        default: throw std::invalid_argument("qubit_axis_basis: unknown axis");
    }
    return b;
}

// e^{i S^gamma t} for spin 1: eigenvalues -1, 0, 1, so
// f(S) = I + i sin(t) S + (cos(t) - 1) S^2.
Matrix spin1_rotation(char gamma, double t) {
    SpinOps s = spin_operators(3);
    const Matrix& g = gamma == 'x' ? s.sx : gamma == 'y' ? s.sy : s.sz;
    return Matrix::Identity(3, 3) + cplx(0, std::sin(t)) * g + (std::cos(t) - 1.0) * (g * g);
}

struct PathContext {
    const MeasurementPlan* plan;
    std::array<double, 3> readout{};
    double total_prob = 0;
    std::size_t paths = 0;
};

std::array<int, 3> readout_parities(int s0, const std::vector<int>& bulk) {
    ByproductFrame frame;
    frame.record_site0(s0);
    for (int s : bulk) frame.record_bulk(s);
    return frame.parity;
}

} // namespace

MeasurementPlan MeasurementPlan::identity(int n_bulk, char readout) {
    MeasurementPlan p;
    p.sites.assign(n_bulk, SiteSetting{});
    p.readout_axis = readout;
    return p;
}

MeasurementPlan MeasurementPlan::single_rotation(int n_bulk, int k, char axis, double angle,
                                                 char readout) {
    if (k < 1 || k > n_bulk) throw std::invalid_argument("single_rotation: site out of range");
    MeasurementPlan p = identity(n_bulk, readout);
    p.sites[k - 1] = SiteSetting{axis, angle, true};
    return p;
}

void ByproductFrame::record_site0(int s0) {
    // (sigma^z)^{s0+1}: flips x and y readouts when s0 = 0.
    if (((s0 + 1) % 2) == 1) {
        parity[0] = -parity[0];
        parity[1] = -parity[1];
    }
}

void ByproductFrame::record_bulk(int axis_idx) {
    for (int a = 0; a < 3; ++a)
        if (a != axis_idx) parity[a] = -parity[a];
}

Vector cartesian_state(char axis) {
    Vector v = Vector::Zero(3);
    double r = 1.0 / std::sqrt(2.0);
    switch (axis) {
        case 'x': v(0) = cplx(0, r); v(2) = cplx(0, -r); break;
        case 'y': v(0) = r; v(2) = r; break;
        case 'z': v(1) = 1; break;
        default: throw std::invalid_argument("cartesian_state: unknown axis");
    }
    return v;
}

std::array<Vector, 3> rotated_spin1_basis(char gamma, double theta) {
    Matrix rot = spin1_rotation(gamma, theta / 2.0);
    return {rot * cartesian_state('x'), rot * cartesian_state('y'), rot * cartesian_state('z')};
}

double adaptive_angle(double phi, char gamma, int s0, const std::vector<int>& prior_outcomes) {
    int g = axis_index(gamma);
    int sign = 1;
    if (gamma != 'z' && (s0 % 2) == 1) sign = -sign;
    for (int s : prior_outcomes) {
        if (s < 0 || s > 2) throw std::invalid_argument("adaptive_angle: bad outcome label");
        if (s != g) sign = -sign;
    }
    return phi * sign;
}

MeasureOutcome measure_site(const StateVector& state, int site,
                            const std::vector<Matrix>& projectors, CounterRng& rng) {
    if (projectors.empty()) throw std::invalid_argument("measure_site: no projectors");
    int d = state.spec.site_dims.at(site);
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& p : projectors) {
        if (p.rows() != d || p.cols() != d)
            throw std::invalid_argument("measure_site: projector dimension mismatch");
        sum += p;
    }
    if ((sum - Matrix::Identity(d, d)).norm() > 1e-10)
        throw std::invalid_argument("measure_site: projectors do not resolve the identity");

    std::vector<StateVector> collapsed;
    std::vector<double> probs;
    collapsed.reserve(projectors.size());
    double total = 0;
    for (const auto& p : projectors) {
        StateVector w = apply_local(state, LocalOperator(site, p));
        double q = 0;
        for (const auto& a : w.amp) q += std::norm(a);
        collapsed.push_back(std::move(w));
        probs.push_back(q);
        total += q;
    }
    if (total < 1e-14) throw std::runtime_error("measure_site: numerically null state");

    double r = rng.uniform() * total;
    double cum = 0;
    std::size_t pick = probs.size() - 1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (r < cum) {
            pick = i;
            break;
        }
    }
    MeasureOutcome out;
    out.outcome = static_cast<int>(pick);
    out.prob = probs[pick] / total;
    out.state = std::move(collapsed[pick]);
    out.state.normalize();
    return out;
}

RoundResult run_round(const StateVector& state, const MeasurementPlan& plan, CounterRng& rng) {
    const ChainSpec& spec = state.spec;
    if (!spec.is_mbqc_chain() || spec.site_dims[1] != 3)
        throw std::invalid_argument("run_round: expected a (2,3,...,3,2) chain");
    int n = spec.n_bulk();
    if (plan.n_bulk() != n) throw std::invalid_argument("run_round: plan does not cover the chain");

    RoundResult res;
    std::vector<cplx> cur = state.amp;
    std::vector<cplx> tail;
    std::size_t rest = spec.total_dim();

    // site 0
    {
        rest /= 2;
        auto basis = qubit_axis_basis(plan.site0_axis);
        double w0 = project_leading(cur, 2, rest, basis[0], tail);
        std::vector<cplx> tail1;
        double w1 = project_leading(cur, 2, rest, basis[1], tail1);
        double total = w0 + w1;
        if (total < 1e-14) throw std::runtime_error("run_round: null state at site 0");
        res.path.s0 = (rng.uniform() * total < w0) ? 0 : 1;
        res.path.probability = (res.path.s0 == 0 ? w0 : w1) / total;
        cur = res.path.s0 == 0 ? std::move(tail) : std::move(tail1);
    }

    // bulk sites
    for (int j = 1; j <= n; ++j) {
        const SiteSetting& set = plan.sites[j - 1];
        double theta = set.adaptive ? adaptive_angle(set.angle, set.axis, res.path.s0, res.path.s)
                                    : set.angle;
        auto basis = rotated_spin1_basis(set.axis, theta);
        rest /= 3;
        std::array<std::vector<cplx>, 3> tails;
        std::array<double, 3> w{};
        double total = 0;
        for (int a = 0; a < 3; ++a) {
            w[a] = project_leading(cur, 3, rest, basis[a], tails[a]);
            total += w[a];
        }
        if (total < 1e-14) throw std::runtime_error("run_round: null state at site " + std::to_string(j));
        double r = rng.uniform() * total;
        int pick = 2;
        double cum = 0;
        for (int a = 0; a < 3; ++a) {
            cum += w[a];
            if (r < cum) {
                pick = a;
                break;
            }
        }
        res.path.s.push_back(pick);
        res.path.probability *= w[pick] / total;
        cur = std::move(tails[pick]);
    }

    // readout at site N+1 on the remaining qubit
    {
        auto basis = qubit_axis_basis(plan.readout_axis);
        double w0 = 0, w1 = 0;
        cplx a0(0, 0), a1(0, 0);
        a0 = std::conj(basis[0](0)) * cur[0] + std::conj(basis[0](1)) * cur[1];
        a1 = std::conj(basis[1](0)) * cur[0] + std::conj(basis[1](1)) * cur[1];
        w0 = std::norm(a0);
        w1 = std::norm(a1);
        double total = w0 + w1;
        if (total < 1e-14) throw std::runtime_error("run_round: null readout state");
        res.path.s_last = (rng.uniform() * total < w0) ? 0 : 1;
        res.path.probability *= (res.path.s_last == 0 ? w0 : w1) / total;
    }

    res.path.readout_sign = readout_parities(res.path.s0, res.path.s)[axis_index(plan.readout_axis)];
    res.mu = (res.path.s_last == 0 ? 1 : -1) * res.path.readout_sign;
    return res;
}

McEstimate monte_carlo(const StateVector& state, const MeasurementPlan& plan,
                       std::uint64_t seed, std::uint64_t rounds, int jobs) {
    if (rounds == 0) throw std::invalid_argument("monte_carlo: rounds must be positive");

    // Round i uses stream i: the estimate is bit-identical for any job count.
    int threads = jobs > 0 ? jobs : default_jobs();
    std::vector<long long> sums(std::max(1, threads), 0);
    parallel_chunks(rounds, [&](std::size_t b, std::size_t e, int t) {
        long long local = 0;
        for (std::size_t i = b; i < e; ++i) {
            CounterRng rng(seed, i);
            local += run_round(state, plan, rng).mu;
        }
        sums[t] += local;
    }, threads);

    long long total = 0;
    for (long long s : sums) total += s;
    McEstimate est;
    est.rounds = rounds;
    est.mean = static_cast<double>(total) / static_cast<double>(rounds);
    // mu is +-1, so the sample variance is (1 - mean^2) * M / (M - 1).
    double var = rounds > 1 ? (1.0 - est.mean * est.mean) * static_cast<double>(rounds) /
                                  static_cast<double>(rounds - 1)
                            : 0.0;
    est.stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(rounds));
    return est;
}

namespace {

void enumerate_dfs(const std::vector<cplx>& cur, std::size_t rest, int next_site,
                   const StateVector& root, const MeasurementPlan& plan, int s0,
                   std::vector<int>& outcomes, PathContext& ctx) {
    const ChainSpec& spec = root.spec;
    int n = spec.n_bulk();
    if (next_site > n) {
        // Two amplitudes left on the boundary qubit: fold the readout in
        // analytically instead of branching on s_{N+1}.
        double w = std::norm(cur[0]) + std::norm(cur[1]);
        ctx.paths += 1;
        ctx.total_prob += w;
        if (w < 1e-300) return;
        auto parities = readout_parities(s0, outcomes);
        cplx up = cur[0], dn = cur[1];
        double sx = 2.0 * (std::conj(up) * dn).real();
        double sy = 2.0 * (std::conj(up) * dn).imag();
        double sz = std::norm(up) - std::norm(dn);
        ctx.readout[0] += parities[0] * sx;
        ctx.readout[1] += parities[1] * sy;
        ctx.readout[2] += parities[2] * sz;
        return;
    }
    const SiteSetting& set = plan.sites[next_site - 1];
    double theta = set.adaptive ? adaptive_angle(set.angle, set.axis, s0, outcomes) : set.angle;
    auto basis = rotated_spin1_basis(set.axis, theta);
    std::size_t tail_rest = rest / 3;
    std::vector<cplx> tail;
    for (int a = 0; a < 3; ++a) {
        double w = project_leading(cur, 3, tail_rest, basis[a], tail);
        if (w < 1e-300 && next_site < n) {
            // Still recurse: deeper adaptive angles do not depend on the
            // amplitude, and zero-weight subtrees contribute zero.
        }
        outcomes.push_back(a);
        enumerate_dfs(tail, tail_rest, next_site + 1, root, plan, s0, outcomes, ctx);
        outcomes.pop_back();
    }
}

} // namespace

PathSum enumerate_paths(const StateVector& state, const MeasurementPlan& plan,
                        std::size_t path_budget) {
    const ChainSpec& spec = state.spec;
    if (!spec.is_mbqc_chain() || spec.site_dims[1] != 3)
        throw std::invalid_argument("enumerate_paths: expected a (2,3,...,3,2) chain");
    int n = spec.n_bulk();
    if (plan.n_bulk() != n) throw std::invalid_argument("enumerate_paths: plan does not cover the chain");
    std::size_t count = 2;
    for (int j = 0; j < n; ++j) {
        count *= 3;
        if (count > path_budget) throw std::invalid_argument("enumerate_paths: path budget exceeded");
    }

    PathContext ctx;
    ctx.plan = &plan;
    auto basis0 = qubit_axis_basis(plan.site0_axis);
    std::size_t rest = spec.total_dim() / 2;
    std::vector<cplx> tail;
    std::vector<int> outcomes;
    for (int s0 = 0; s0 < 2; ++s0) {
        project_leading(state.amp, 2, rest, basis0[s0], tail);
        enumerate_dfs(tail, rest, 1, state, plan, s0, outcomes, ctx);
    }

    PathSum sum;
    sum.readout = ctx.readout;
    sum.total_probability = ctx.total_prob;
    sum.paths = ctx.paths;
    return sum;
}

std::vector<TeleportBranch> teleport_step(const StateVector& abc, char gamma, double theta) {
    if (abc.spec.site_dims != std::vector<int>{2, 2, 2})
        throw std::invalid_argument("teleport_step: expected three qubits");

    // fidelity of the (b,c) marginal with the singlet
    double norm2 = 0, overlap = 0;
    double r = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < 2; ++a) {
        // <singlet|psi(a,.,.)> with singlet = (|01> - |10>)/sqrt(2)
        cplx ov = r * abc.amp[a * 4 + 1] - r * abc.amp[a * 4 + 2];
        overlap += std::norm(ov);
    }
    for (const auto& v : abc.amp) norm2 += std::norm(v);
    if (norm2 < 1e-14 || overlap / norm2 < 1.0 - 1e-10)
        throw std::invalid_argument("teleport_step: qubits b,c are not in the singlet state");

    // Bell basis on (a,b) with the triplet rotated by e^{-i S^gamma theta/2};
    // the singlet is invariant under the collective rotation.
    Matrix iso = triplet_isometry(); // 3x4
    SpinOps q = spin_operators(2);
    const Matrix& sg = gamma == 'x' ? q.sx : gamma == 'y' ? q.sy : q.sz;
    Matrix s_ab = Matrix::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                s_ab(i * 2 + k, j * 2 + k) += sg(i, j); // S on a
                s_ab(k * 2 + i, k * 2 + j) += sg(i, j); // S on b
            }
        }
    // eigenvalues of S_ab are {-1, 0, 0, 1}: same polynomial form as spin 1
    double t = -theta / 2.0;
    Matrix rot = Matrix::Identity(4, 4) + cplx(0, std::sin(t)) * s_ab + (std::cos(t) - 1.0) * (s_ab * s_ab);

    std::vector<std::pair<char, Vector>> bras;
    Vector singlet(4);
    singlet << 0, r, -r, 0;
    bras.emplace_back('s', singlet);
    for (char ax : kAxes) bras.emplace_back(ax, Vector(rot * (iso.adjoint() * cartesian_state(ax))));

    std::vector<TeleportBranch> out;
    double total = 0;
    for (auto& [label, ket] : bras) {
        Vector c(2);
        c.setZero();
        for (int ab = 0; ab < 4; ++ab) {
            cplx coeff = std::conj(ket(ab));
            if (coeff == cplx(0, 0)) continue;
            c(0) += coeff * abc.amp[ab * 2 + 0];
            c(1) += coeff * abc.amp[ab * 2 + 1];
        }
        TeleportBranch br;
        br.outcome = label;
        br.prob = c.squaredNorm() / norm2;
        total += br.prob;
        if (br.prob > 1e-14) c /= c.norm();
        br.state_c = c;
        out.push_back(std::move(br));
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw std::runtime_error("teleport_step: branch probabilities do not sum to one");
    return out;
}

} // namespace sptmbqc
