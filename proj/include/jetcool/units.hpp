#pragma once

// Boundary units (mm, mL/min, cm²) to SI and back.

namespace jetcool::units {

inline constexpr double mm = 1e-3;
inline constexpr double um = 1e-6;
inline constexpr double cm2 = 1e-4;
inline constexpr double mm2 = 1e-6;

inline constexpr double mlpm_to_m3s(double mlpm) { return mlpm * 1e-6 / 60.0; }
inline constexpr double m3s_to_mlpm(double m3s) { return m3s * 60.0 * 1e6; }
inline constexpr double m2_to_cm2(double m2) { return m2 * 1e4; }

}  // namespace jetcool::units
