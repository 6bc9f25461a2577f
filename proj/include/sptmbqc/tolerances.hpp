#pragma once

// Central numerical tolerances. Three tiers: vector-level checks (norms,
// hermiticity of expectation values), operator-identity checks done in
// matrix norm, and physics-level assertions on expectation values.
namespace sptmbqc::tol {

inline constexpr double norm = 1e-12;
inline constexpr double op_identity = 1e-13;
inline constexpr double physics = 1e-10;

} // namespace sptmbqc::tol
