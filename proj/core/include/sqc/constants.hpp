#pragma once

namespace sqc::constants {

// 2019 SI exact values.
inline constexpr double elementary_charge_C = 1.602176634e-19;
inline constexpr double planck_J_s = 6.62607015e-34;

// e^2/h expressed in GHz*fF: a charging-energy prefactor such that
// E/h [GHz] = e2_over_h_GHz_fF / C [fF].  Twelve significant digits:
// 38.7404585015 GHz*fF.
inline constexpr double e2_over_h_GHz_fF =
    elementary_charge_C * elementary_charge_C / planck_J_s * 1e-9 / 1e-15;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

} // namespace sqc::constants
