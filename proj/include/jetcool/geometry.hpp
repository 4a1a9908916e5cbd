#pragma once

// Nozzle-array geometry: unit cell, N×N array on a square chip, normalization helpers.

#include <cmath>
#include <numbers>

#include "jetcool/error.hpp"
#include "jetcool/units.hpp"

namespace jetcool {

/// Repeating tile of the array: one inlet nozzle with its surrounding outlets. Lengths in m.
struct UnitCell {
    double pitch;             // L
    double d_in;              // d_i
    double d_out;             // d_o
    double cavity_height;     // H
    double plate_thickness;   // t
    double chip_thickness;    // t_c

    double di_over_L() const { return d_in / pitch; }
    double do_over_L() const { return d_out / pitch; }
    double H_over_L() const { return cavity_height / pitch; }
    double t_over_L() const { return plate_thickness / pitch; }
    double tc_over_L() const { return chip_thickness / pitch; }

    void validate() const {
        for (double v : {pitch, d_in, d_out, cavity_height, plate_thickness, chip_thickness})
            require(std::isfinite(v) && v > 0.0, ErrorKind::invalid_geometry, "unit cell lengths must be > 0");
        require(d_in < pitch, ErrorKind::invalid_geometry, "d_i must be smaller than the pitch L");
        require(d_out < pitch, ErrorKind::invalid_geometry, "d_o must be smaller than the pitch L");
    }
};

struct CoolerArray {
    double chip_side;              // m, square chip
    int n;                         // inlets per row (N×N array)
    UnitCell cell;                 // cell.pitch = chip_side / n
    double heated_fraction = 0.75; // share of the chip area covered by heaters

    double chip_area() const { return chip_side * chip_side; }
    double heated_area() const { return heated_fraction * chip_area(); }
    int nozzle_count() const { return n * n; }
    /// Nozzles per cm².
    double nozzle_density() const { return static_cast<double>(n) * n / units::m2_to_cm2(chip_area()); }

    void validate() const {
        require(n >= 1, ErrorKind::invalid_geometry, "array needs n >= 1");
        require(std::isfinite(chip_side) && chip_side > 0.0, ErrorKind::invalid_geometry, "chip side must be > 0");
        require(heated_fraction > 0.0 && heated_fraction <= 1.0, ErrorKind::invalid_geometry,
                "heated fraction must lie in (0, 1]");
        cell.validate();
        require(std::abs(cell.pitch * n - chip_side) <= 1e-12 * chip_side, ErrorKind::invalid_geometry,
                "cell pitch times n must equal the chip side");
    }
};

/// Builds an array from dimensionless ratios; L = chip_side / n.
inline CoolerArray array_from_ratios(double chip_side, int n, double di_over_L, double do_over_L,
                                     double H_over_L, double t_over_L, double t_c,
                                     double heated_fraction = 0.75) {
    require(n >= 1, ErrorKind::invalid_geometry, "n must be >= 1");
    require(chip_side > 0.0, ErrorKind::invalid_geometry, "chip side must be > 0");
    require(di_over_L > 0.0 && di_over_L < 1.0, ErrorKind::invalid_geometry, "d_i/L must lie in (0, 1)");
    require(do_over_L > 0.0 && do_over_L < 1.0, ErrorKind::invalid_geometry, "d_o/L must lie in (0, 1)");
    require(H_over_L > 0.0 && t_over_L > 0.0, ErrorKind::invalid_geometry, "H/L and t/L must be > 0");
    require(t_c > 0.0, ErrorKind::invalid_geometry, "chip thickness must be > 0");
    const double L = chip_side / n;
    CoolerArray a{chip_side, n, UnitCell{L, di_over_L * L, do_over_L * L, H_over_L * L, t_over_L * L, t_c},
                  heated_fraction};
    a.validate();
    return a;
}

struct Normalized {
    double r_star;  // K·cm²/W
    double w_star;  // W/cm²
    double v_star;  // (m³/s)/cm²
};

/// Area-normalized thermal resistance, pump power and flow for an area given in cm².
inline Normalized normalize_cm2(double r_th, double w_p, double v_dot, double area_cm2) {
    require(area_cm2 > 0.0, ErrorKind::invalid_input, "normalize: area must be > 0");
    return {r_th * area_cm2, w_p / area_cm2, v_dot / area_cm2};
}

/// Same, area in m².
inline Normalized normalize(double r_th, double w_p, double v_dot, double area) {
    require(area > 0.0, ErrorKind::invalid_input, "normalize: area must be > 0");
    return normalize_cm2(r_th, w_p, v_dot, units::m2_to_cm2(area));
}

inline double per_nozzle_flow(double v_total, int n) {
    require(n >= 1, ErrorKind::invalid_input, "per_nozzle_flow: n must be >= 1");
    return v_total / (static_cast<double>(n) * n);
}

/// Chip power (W) a cell of normalized resistance r_star (K·cm²/W) removes over area_cm2 at dT_allow.
inline double extrapolate_power(double r_star, double area_cm2, double dT_allow) {
    require(r_star > 0.0, ErrorKind::invalid_input, "extrapolate_power: r_star must be > 0");
    require(area_cm2 >= 0.0 && dT_allow >= 0.0, ErrorKind::invalid_input,
            "extrapolate_power: area and dT must be >= 0");
    return dT_allow * area_cm2 / r_star;
}

inline double circle_area(double d) { return std::numbers::pi * d * d / 4.0; }

}  // namespace jetcool
