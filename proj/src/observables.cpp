#include "sptmbqc/observables.hpp"

#include "sptmbqc/tolerances.hpp"

#include <cmath>
#include <stdexcept>

namespace sptmbqc {

namespace {

const Matrix& bulk_spin(const SpinOps& s, char axis) {
    return axis == 'x' ? s.sx : axis == 'y' ? s.sy : s.sz;
}

const Matrix& bulk_flip(const SpinOps& s, char axis) {
    return axis == 'x' ? s.exp_pi_sx : axis == 'y' ? s.exp_pi_sy : s.exp_pi_sz;
}

double real_expectation(const StateVector& state, const OperatorString& op, const char* what) {
    cplx v = expectation(state, op);
    if (std::abs(v.imag()) >= tol::physics)
        throw std::runtime_error(std::string(what) + ": expectation has imaginary part " +
                                 std::to_string(v.imag()));
    return v.real();
}

void check_chain(const StateVector& state, const char* what) {
    if (!state.spec.is_mbqc_chain() || state.spec.site_dims[1] != 3)
        throw std::invalid_argument(std::string(what) + ": expected a (2,3,...,3,2) chain");
}

} // namespace

double string_order_bulk(const StateVector& state, int i, int j, char axis) {
    check_chain(state, "string_order_bulk");
    int n = state.spec.n_bulk();
    if (!(1 <= i && i < j && j <= n))
        throw std::out_of_range("string_order_bulk: need 1 <= i < j <= N");
    SpinOps s = spin_operators(3);
    std::vector<LocalOperator> factors;
    factors.emplace_back(i, bulk_spin(s, axis));
    for (int m = i + 1; m <= j - 1; ++m) factors.emplace_back(m, bulk_flip(s, axis));
    factors.emplace_back(j, bulk_spin(s, axis));
    return real_expectation(state, OperatorString(std::move(factors)), "string_order_bulk");
}

double string_order_bulk_end(const StateVector& state, int i, char axis) {
    check_chain(state, "string_order_bulk_end");
    int n = state.spec.n_bulk();
    if (!(1 <= i && i <= n)) throw std::out_of_range("string_order_bulk_end: need 1 <= i <= N");
    SpinOps s = spin_operators(3);
    std::vector<LocalOperator> factors;
    factors.emplace_back(i, bulk_spin(s, axis));
    for (int m = i + 1; m <= n; ++m) factors.emplace_back(m, bulk_flip(s, axis));
    factors.emplace_back(n + 1, pauli(axis));
    return real_expectation(state, OperatorString(std::move(factors)), "string_order_bulk_end");
}

double nu_string_order(const StateVector& state, int k, char axis) {
    check_chain(state, "nu_string_order");
    int n = state.spec.n_bulk();
    if (!(1 <= k && k <= n)) throw std::out_of_range("nu_string_order: need 1 <= k <= N");
    SpinOps s = spin_operators(3);
    std::vector<LocalOperator> factors;
    factors.emplace_back(k, Matrix(bulk_spin(s, axis) * bulk_flip(s, axis)));
    for (int m = k + 1; m <= n; ++m) factors.emplace_back(m, bulk_flip(s, axis));
    factors.emplace_back(n + 1, pauli(axis));
    return real_expectation(state, OperatorString(std::move(factors)), "nu_string_order");
}

std::array<double, 3> proposition1_rhs(const StateVector& state, int k, double phi) {
    check_chain(state, "proposition1_rhs");
    int n = state.spec.n_bulk();
    if (!(1 <= k && k <= n)) throw std::out_of_range("proposition1_rhs: need 1 <= k <= N");
    SpinOps s = spin_operators(3);

    // cos(S^z phi) and sin(S^z phi) are diagonal in the m basis.
    Matrix cosm = Matrix::Identity(3, 3);
    cosm(0, 0) = std::cos(phi);
    cosm(2, 2) = std::cos(phi);
    Matrix sinm = Matrix::Zero(3, 3);
    sinm(0, 0) = std::sin(phi);
    sinm(2, 2) = -std::sin(phi);

    double x = real_expectation(state, OperatorString({LocalOperator(k, cosm)}), "proposition1_rhs");

    std::vector<LocalOperator> factors;
    factors.emplace_back(k, Matrix(sinm * s.exp_pi_sz));
    for (int m = k + 1; m <= n; ++m) factors.emplace_back(m, s.exp_pi_sz);
    factors.emplace_back(n + 1, pauli('z'));
    double y = real_expectation(state, OperatorString(std::move(factors)), "proposition1_rhs");

    return {x, y, 0.0};
}

std::vector<SmallAngleRow> small_angle_report(const StateVector& state, int k,
                                              const std::vector<double>& phi_grid) {
    double nu = nu_string_order(state, k, 'z');
    std::vector<SmallAngleRow> rows;
    rows.reserve(phi_grid.size());
    for (double phi : phi_grid) {
        if (phi == 0.0) throw std::invalid_argument("small_angle_report: phi must be nonzero");
        SmallAngleRow row;
        row.phi = phi;
        row.nu_z = nu;
        row.y_over_phi = proposition1_rhs(state, k, phi)[1] / phi;
        if (std::abs(nu) >= tol::physics) row.deviation = std::abs(row.y_over_phi - nu);
        rows.push_back(row);
    }
    return rows;
}

} // namespace sptmbqc
