#pragma once

/**
 * @file performance.hpp
 * @brief Design-point evaluation: geometry + coolant + operating point to thermal and
 *        hydraulic figures of merit, plus first-order pressure bookkeeping, lidded-package
 *        series resistance, multi-chip coupling and coolant comparison.
 */

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "jetcool/correlations.hpp"
#include "jetcool/error.hpp"
#include "jetcool/geometry.hpp"
#include "jetcool/props.hpp"
#include "jetcool/rootfind.hpp"

namespace jetcool {

struct OperatingPoint {
    double flow_total;          // m³/s
    double inlet_temp = 10.0;   // °C
    double chip_power = 0.0;    // W
    double ambient_temp = 25.0; // °C
};

struct ReportOptions {
    double dT_max_allow = 60.0;    // K, cooling capacity used for COP
    bool prandtl_scaling = false;  // multiply Nu_f by (Pr/7.56)^(1/3)
};

struct PerformanceReport {
    double flow_per_nozzle;  // m³/s
    double v_nozzle;         // mean inlet nozzle velocity, m/s
    double re;
    double pr;
    double nu_f;
    double bi;
    double nu_j;
    double htc;     // W/(m²·K), junction based
    double r_th;    // K/W
    double r_star;  // K·cm²/W, over the chip area
    double dT_avg;  // K
    double f;
    double k;
    double dp;      // Pa
    double w_p;     // W
    double cop;
    Warnings warnings;
};

inline PredictiveInputs predictive_inputs(const UnitCell& cell, double re) {
    return {cell.di_over_L(), cell.do_over_L(), cell.H_over_L(), cell.t_over_L(), re};
}

/// Correlation chain: V̄ → Re → Nu_f → Bi → Nu_j → htc → R_th, and k → Δp → W_p → COP.
inline PerformanceReport evaluate_design(const CoolerArray& array, const FluidProps& fluid, const SolidProps& solid,
                                         const OperatingPoint& op, const ReportOptions& opt = {}) {
    array.validate();
    fluid.validate();
    solid.validate();
    require(std::isfinite(op.flow_total) && op.flow_total >= 0.0, ErrorKind::invalid_input,
            "operating flow must be >= 0");
    require(op.chip_power >= 0.0, ErrorKind::invalid_input, "chip power must be >= 0");
    require(op.flow_total > 0.0, ErrorKind::no_flow, "total flow is zero");

    const UnitCell& cell = array.cell;
    PerformanceReport r{};
    r.flow_per_nozzle = per_nozzle_flow(op.flow_total, array.n);
    r.v_nozzle = r.flow_per_nozzle / circle_area(cell.d_in);
    r.re = reynolds(fluid, cell.d_in, r.v_nozzle);
    r.pr = prandtl(fluid);

    const auto in = predictive_inputs(cell, r.re);
    auto nu = nu_f_predict(in);
    r.warnings = nu.warnings;
    r.nu_f = nu.value;
    if (opt.prandtl_scaling) r.nu_f *= std::cbrt(r.pr / PR_FIT);
    r.bi = biot(r.nu_f, cell.chip_thickness, cell.d_in, fluid.conductivity, solid.conductivity);
    r.nu_j = biot_correct(r.nu_f, r.bi);
    r.htc = nu_to_htc(r.nu_j, cell.d_in, fluid.conductivity);
    r.r_th = 1.0 / (r.htc * array.heated_area());
    r.r_star = normalize(r.r_th, 0.0, 0.0, array.chip_area()).r_star;
    r.dT_avg = op.chip_power * r.r_th;

    auto fr = friction_predict(in);
    r.warnings.insert(r.warnings.end(), fr.warnings.begin(), fr.warnings.end());
    r.f = fr.f;
    r.k = fr.k;
    r.dp = r.k * 0.5 * fluid.density * r.v_nozzle * r.v_nozzle;
    r.w_p = op.flow_total * r.dp;
    r.cop = (opt.dT_max_allow / r.r_th) / r.w_p;
    return r;
}

struct PressureBreakdown {
    double dp_in_nozzle;
    double dp_out_nozzle;
    double dp_channel;
    double dp_jet_residual;  // not modeled, always 0
    Warnings warnings;
};

/// Laminar pipe loss 8μ·t·V̇ / (π·r⁴).
inline double hagen_poiseuille(double mu, double length, double flow, double d) {
    require(d > 0.0, ErrorKind::invalid_geometry, "hagen_poiseuille: diameter must be > 0");
    const double r = d / 2.0;
    return 8.0 * mu * length * flow / (std::numbers::pi * r * r * r * r);
}

/// First-order split of the unit-cell pressure drop. The cavity term is a plane-Poiseuille
/// slab of length (L − d_i)/2, width L and gap H. Components are not expected to sum to the
/// correlated Δp.
inline PressureBreakdown pressure_decomposition(const UnitCell& cell, const FluidProps& fluid, double v_nozzle) {
    require(cell.d_in > 0.0 && cell.d_out > 0.0, ErrorKind::invalid_geometry, "nozzle diameters must be > 0");
    require(cell.cavity_height > 0.0 && cell.pitch > 0.0, ErrorKind::invalid_geometry, "H and L must be > 0");
    require(v_nozzle >= 0.0, ErrorKind::invalid_input, "nozzle flow must be >= 0");
    const double mu = fluid.viscosity;
    PressureBreakdown p{};
    p.dp_in_nozzle = hagen_poiseuille(mu, cell.plate_thickness, v_nozzle, cell.d_in);
    p.dp_out_nozzle = hagen_poiseuille(mu, cell.plate_thickness, v_nozzle, cell.d_out);
    const double h3 = cell.cavity_height * cell.cavity_height * cell.cavity_height;
    p.dp_channel = 12.0 * mu * v_nozzle * (cell.pitch - cell.d_in) / (2.0 * cell.pitch * h3);
    p.dp_jet_residual = 0.0;
    p.warnings.push_back({"dp_first_order", "slab cavity model and zero jet residual are first-order estimates"});
    return p;
}

/// Lidded package: bare-die normalized resistance plus TIM and lid, 1D series (K·cm²/W).
inline double lidded_series(double r_star, double tim_resistivity, double lid_resistivity) {
    require(r_star >= 0.0 && tim_resistivity >= 0.0 && lid_resistivity >= 0.0, ErrorKind::invalid_input,
            "lidded_series: resistances must be >= 0");
    return r_star + tim_resistivity + lid_resistivity;
}

/// 1D slab resistivity thickness/k, returned in K·cm²/W.
inline double slab_resistivity(double thickness, double conductivity) {
    require(thickness >= 0.0 && conductivity > 0.0, ErrorKind::invalid_input, "slab_resistivity: bad input");
    return units::m2_to_cm2(thickness / conductivity);
}

struct CouplingMeasurement {
    std::size_t active_chip;
    std::vector<double> powers;  // W per chip
    std::vector<double> temps;   // °C per chip
    double t_in;                 // °C
};

struct CouplingMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> r;      // r[i][j] = (T_i − T_in)/P_j, K/W
    std::vector<std::vector<double>> ratio;  // ratio[i][j] = (T_i − T_in)/(T_j − T_in) under chip j active
};

/// Thermal resistance matrix from single-source measurements, one per chip.
inline CouplingMatrix coupling(const std::vector<CouplingMeasurement>& measurements, std::vector<std::string> labels) {
    const std::size_t n = labels.size();
    require(n > 0, ErrorKind::invalid_input, "coupling: no chips");
    CouplingMatrix out{std::move(labels), std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)),
                       std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0))};
    std::vector<bool> seen(n, false);
    for (const auto& m : measurements) {
        require(m.powers.size() == n && m.temps.size() == n, ErrorKind::invalid_input,
                "coupling: measurement vectors must have one entry per chip");
        require(m.active_chip < n, ErrorKind::invalid_input, "coupling: active chip index out of range");
        std::size_t nonzero = 0;
        for (double p : m.powers) {
            require(p >= 0.0, ErrorKind::invalid_input, "coupling: negative power");
            if (p != 0.0) ++nonzero;
        }
        require(nonzero == 1 && m.powers[m.active_chip] > 0.0, ErrorKind::non_meaningful_resistance,
                "thermal resistance needs exactly one powered chip per measurement");
        require(!seen[m.active_chip], ErrorKind::invalid_input, "coupling: chip measured as active twice");
        seen[m.active_chip] = true;
        const std::size_t j = m.active_chip;
        const double rise_active = m.temps[j] - m.t_in;
        for (std::size_t i = 0; i < n; ++i) {
            out.r[i][j] = (m.temps[i] - m.t_in) / m.powers[j];
            out.ratio[i][j] = (m.temps[i] - m.t_in) / rise_active;
        }
        require(out.r[j][j] > 0.0, ErrorKind::non_physical, "coupling: active chip did not heat up");
    }
    for (std::size_t j = 0; j < n; ++j)
        require(seen[j], ErrorKind::invalid_input, "coupling: chip '" + out.labels[j] + "' never measured as active");
    return out;
}

enum class CompareMode { const_flow, const_pump };

struct CoolantRating {
    std::string name;
    double flow_total;     // m³/s used for this coolant
    double htc;            // W/(m²·K)
    double relative_htc;   // htc / htc_reference
};

/// Flow at which the design consumes `pump_power`; W_p(V̇) is strictly increasing.
inline double flow_for_pump_power(const CoolerArray& array, const FluidProps& fluid, const SolidProps& solid,
                                  OperatingPoint op, double pump_power, const ReportOptions& opt = {}) {
    require(pump_power > 0.0, ErrorKind::invalid_input, "pump power target must be > 0");
    auto residual = [&](double q) {
        op.flow_total = q;
        return evaluate_design(array, fluid, solid, op, opt).w_p / pump_power - 1.0;
    };
    auto root = bisect_positive(residual, 1e-9, 1e-5);
    require(root.has_value(), ErrorKind::solver, "could not bracket the flow for the pump-power target");
    return root->x;
}

inline double flow_for_pressure(const CoolerArray& array, const FluidProps& fluid, const SolidProps& solid,
                                OperatingPoint op, double dp_target, const ReportOptions& opt = {}) {
    require(dp_target > 0.0, ErrorKind::invalid_input, "pressure target must be > 0");
    auto residual = [&](double q) {
        op.flow_total = q;
        return evaluate_design(array, fluid, solid, op, opt).dp / dp_target - 1.0;
    };
    auto root = bisect_positive(residual, 1e-9, 1e-5);
    require(root.has_value(), ErrorKind::solver, "could not bracket the flow for the pressure target");
    return root->x;
}

/// Heat transfer of each coolant relative to `reference` at equal flow or equal pump power.
inline std::vector<CoolantRating> coolant_compare(const std::vector<FluidProps>& coolants, const FluidProps& reference,
                                                  const CoolerArray& array, const SolidProps& solid,
                                                  const OperatingPoint& op, CompareMode mode) {
    ReportOptions opt;
    opt.prandtl_scaling = true;
    const auto ref = evaluate_design(array, reference, solid, op, opt);
    std::vector<CoolantRating> out;
    for (const auto& c : coolants) {
        OperatingPoint o = op;
        if (mode == CompareMode::const_pump) o.flow_total = flow_for_pump_power(array, c, solid, op, ref.w_p, opt);
        const auto rep = evaluate_design(array, c, solid, o, opt);
        out.push_back({c.name, o.flow_total, rep.htc, rep.htc / ref.htc});
    }
    return out;
}

}  // namespace jetcool
