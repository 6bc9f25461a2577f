#pragma once

#include "sptmbqc/qcore.hpp"
#include "sptmbqc/rng.hpp"

#include <array>
#include <vector>

namespace sptmbqc {

struct SiteSetting {
    char axis = 'z';      // rotation axis gamma_j
    double angle = 0.0;   // algorithm angle phi_j; 0 means unrotated basis
    bool adaptive = true; // apply the outcome-dependent sign rule to the angle
};

struct MeasurementPlan {
    std::vector<SiteSetting> sites; // one entry per bulk site 1..N
    char site0_axis = 'x';
    char readout_axis = 'x';

    static MeasurementPlan identity(int n_bulk, char readout = 'x');
    // All sites unrotated except site k, rotated about `axis` by `angle`.
    static MeasurementPlan single_rotation(int n_bulk, int k, char axis, double angle,
                                           char readout = 'x');
    int n_bulk() const { return static_cast<int>(sites.size()); }
};

struct MeasurementPath {
    int s0 = 0;                 // boundary outcome, 0 or 1
    std::vector<int> s;         // bulk outcomes as axis indices 0=x,1=y,2=z
    int s_last = 0;             // raw readout outcome, 0 or 1
    double probability = 0;     // product of Born weights along the path
    int readout_sign = 1;       // byproduct parity applied to the readout
};

// Tracks the accumulated byproduct parity per readout axis. Outcome 0 at
// site 0 leaves the traveling qubit in sigma^z|+>, so the site-0 byproduct
// is (sigma^z)^{s0+1}; each bulk outcome s_j contributes sigma^{s_j}.
struct ByproductFrame {
    std::array<int, 3> parity = {1, 1, 1}; // per readout axis x,y,z

    void record_site0(int s0);
    void record_bulk(int axis_idx);
    int sign(char readout_axis) const { return parity[axis_index(readout_axis)]; }
};

// Spin-1 states |S^alpha = 0> in the (m=+1, 0, -1) basis, with the phases of
// the Bell-pair construction carried through the triplet isometry.
Vector cartesian_state(char axis);

// Measurement basis {|alpha,(gamma,theta)>} = {e^{+i S^gamma theta/2}|alpha>}.
// theta = 0 returns the unrotated triple; orthonormal and complete for all
// (gamma, theta).
std::array<Vector, 3> rotated_spin1_basis(char gamma, double theta);

// theta_k = phi * (-1)^{s0(1-delta_{gamma,z})} * prod_j (-1)^{1-delta_{gamma,s_j}}
double adaptive_angle(double phi, char gamma, int s0, const std::vector<int>& prior_outcomes);

struct MeasureOutcome {
    int outcome = 0;
    StateVector state; // collapsed and renormalized
    double prob = 0;
};

// Projective measurement of one site in the given complete orthogonal
// projector set. Born sampling by inverse CDF with strict-less comparison.
MeasureOutcome measure_site(const StateVector& state, int site,
                            const std::vector<Matrix>& projectors, CounterRng& rng);

struct RoundResult {
    MeasurementPath path;
    int mu = 1; // readout eigenvalue including the byproduct parity
};

// One full adaptive round: site 0, bulk sites in order, then the
// byproduct-adjusted readout at site N+1.
RoundResult run_round(const StateVector& state, const MeasurementPlan& plan, CounterRng& rng);

struct McEstimate {
    double mean = 0;
    double stderr_ = 0;
    std::uint64_t rounds = 0;
};

// Averages run_round over `rounds` independent rounds; round i draws from
// stream i of the seed, so results are identical for any thread count.
McEstimate monte_carlo(const StateVector& state, const MeasurementPlan& plan,
                       std::uint64_t seed, std::uint64_t rounds, int jobs = 0);

struct PathSum {
    std::array<double, 3> readout{};  // <<sigma^alpha>> for alpha = x, y, z
    double total_probability = 0;     // sums to 1 over exact enumeration
    std::size_t paths = 0;
};

// Exact sum over all 2*3^N measurement paths, evaluating the readout
// analytically on each collapsed boundary state (depth-first, partial states
// reused, never materializing the paths).
PathSum enumerate_paths(const StateVector& state, const MeasurementPlan& plan,
                        std::size_t path_budget = 2 * 59049 /* N = 10 */);

struct TeleportBranch {
    char outcome;      // 's', 'x', 'y' or 'z'
    Vector state_c;    // post-measurement state of qubit c, normalized
    double prob;
};

// Three-qubit teleportation oracle: qubit a arbitrary, (b,c) in the singlet,
// (a,b) measured in the Bell basis rotated about gamma by theta.
std::vector<TeleportBranch> teleport_step(const StateVector& abc, char gamma, double theta);

} // namespace sptmbqc
