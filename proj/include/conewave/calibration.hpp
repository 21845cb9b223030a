#pragma once

// Frozen constants, set once from fixed-seed measurement runs. The
// acceptance run asserts against them.

namespace conewave::calibration {

// Constructions.
inline constexpr double kappa0 = 0.12;  // |phi| floor on the bump's unit cube
inline constexpr double kappa1 = 0.75;  // cross-section mass of a blue tube wave
inline constexpr double C_loc = 1.0;    // localization radius, half the mass inside
inline constexpr double C_B = 1.0;      // sup |phi| of mass-1 red waves, frequency 1

// Norms.
inline constexpr double C_star = 1.0;   // bilinear ratio ceiling
inline constexpr double rho_min = 0.4;  // sharpness floor
inline constexpr double K_lp = 1.0;     // scaled L^p ceiling

// Covering.
inline constexpr double K_cov = 64.0;

// Exceptional tubes: count <= K_exc * delta^-K_e.
inline constexpr double K_exc = 16.0;
inline constexpr double K_e = 3.0;

// Extraction.
inline constexpr double c_dec = 0.5;
inline constexpr double K_F = 1.0;      // mass(F) <= K_F ln(1/delta)
inline constexpr double eps_off = 0.5;  // off-tube ratio of an extractor
inline constexpr double c_dilate = 0.5;

// Profile and fungibility.
inline constexpr double c_comp = 1.0;
inline constexpr double C_v = 0.5;
inline constexpr double C_f = 1.0;
inline constexpr double K_u = 1.0;  // tubes <= K_u delta^-K_p
inline constexpr double K_i = 1.0;  // intervals <= K_i delta^-K_p
inline constexpr double K_p = 3.0;

}  // namespace conewave::calibration
