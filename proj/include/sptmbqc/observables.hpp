#pragma once

#include "sptmbqc/qcore.hpp"

#include <array>
#include <optional>
#include <vector>

namespace sptmbqc {

struct StringOrderResult {
    enum class Kind { bulk_bulk, bulk_end };
    Kind kind = Kind::bulk_bulk;
    char axis = 'z';
    int i = 0;
    int j = 0; // N+1 for bulk_end
    double value = 0;
};

// <S_i^a (Prod_{m=i+1}^{j-1} e^{i pi S_m^a}) S_j^a>, 1 <= i < j <= N.
double string_order_bulk(const StateVector& state, int i, int j, char axis);

// <S_i^a (Prod_{m=i+1}^{N} e^{i pi S_m^a}) sigma_{N+1}^a>, 1 <= i <= N.
double string_order_bulk_end(const StateVector& state, int i, char axis);

// nu_a = <S_k^a (Prod_{j=k}^{N} e^{i pi S_j^a}) sigma_{N+1}^a>. The string
// starts at j = k, which differs from string_order_bulk_end by the extra
// e^{i pi S_k^a} factor (a sign for spin 1).
double nu_string_order(const StateVector& state, int k, char axis = 'z');

// Closed form for a single z-rotation at site k with algorithm angle phi:
// ( <cos(S_k^z phi)>, <sin(S_k^z phi) (Prod_{j=k}^N e^{i pi S_j^z}) sigma^z_{N+1}>, 0 ).
std::array<double, 3> proposition1_rhs(const StateVector& state, int k, double phi);

struct SmallAngleRow {
    double phi = 0;
    double y_over_phi = 0;
    double nu_z = 0;
    std::optional<double> deviation; // |y/phi - nu_z|; empty when nu_z ~ 0
};

// Convergence of the effective rotation angle to nu_z * phi. phi values must
// be nonzero; if nu_z vanishes the ratio is reported without a deviation.
std::vector<SmallAngleRow> small_angle_report(const StateVector& state, int k,
                                              const std::vector<double>& phi_grid);

} // namespace sptmbqc
