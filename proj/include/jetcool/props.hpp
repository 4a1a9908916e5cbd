#pragma once

/**
 * @file props.hpp
 * @brief Coolant and solid property catalog plus the dimensionless groups driven by it.
 *
 * Properties are constant (temperature independent). Custom materials load from a CSV with
 * header `name,density_kg_m3,viscosity_kg_ms,cp_J_kgK,k_W_mK,ref_temp_C`; a row with only
 * `name` and `k_W_mK` filled describes a solid.
 */

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "jetcool/csv.hpp"
#include "jetcool/error.hpp"

namespace jetcool {

struct FluidProps {
    std::string name;
    double density;        // kg/m³
    double viscosity;      // kg/(m·s)
    double specific_heat;  // J/(kg·K)
    double conductivity;   // W/(m·K)
    double reference_temp; // °C

    void validate() const {
        auto positive = [&](double v, const char* what) {
            require(std::isfinite(v) && v > 0.0, ErrorKind::invalid_input,
                    "fluid '" + name + "': " + what + " must be finite and > 0");
        };
        positive(density, "density");
        positive(viscosity, "viscosity");
        positive(specific_heat, "specific_heat");
        positive(conductivity, "conductivity");
        positive(reference_temp, "reference_temp");
    }
};

struct SolidProps {
    std::string name;
    double conductivity;  // W/(m·K), isotropic

    void validate() const {
        require(std::isfinite(conductivity) && conductivity > 0.0, ErrorKind::invalid_input,
                "solid '" + name + "': conductivity must be > 0");
    }
};

/// Prandtl number the published correlation fits were generated at (DI water).
inline constexpr double PR_FIT = 7.56;

inline double reynolds(const FluidProps& fluid, double d, double v) {
    require(std::isfinite(d) && std::isfinite(v) && std::isfinite(fluid.density) &&
                std::isfinite(fluid.viscosity),
            ErrorKind::invalid_input, "reynolds: non-finite input");
    require(d > 0.0, ErrorKind::invalid_input, "reynolds: diameter must be > 0");
    require(v >= 0.0, ErrorKind::invalid_input, "reynolds: velocity must be >= 0");
    require(fluid.viscosity > 0.0, ErrorKind::invalid_input, "reynolds: viscosity must be > 0");
    return fluid.density * d * v / fluid.viscosity;
}

inline double prandtl(const FluidProps& fluid) {
    require(fluid.conductivity > 0.0, ErrorKind::invalid_input, "prandtl: conductivity must be > 0");
    return fluid.viscosity * fluid.specific_heat / fluid.conductivity;
}

/// Bi = Nu_f · (t_c/d_i) · (k_f/k_s).
inline double biot(double nu_f, double t_c, double d_i, double k_f, double k_s) {
    require(d_i > 0.0, ErrorKind::invalid_input, "biot: d_i must be > 0");
    require(k_s > 0.0, ErrorKind::invalid_input, "biot: k_s must be > 0");
    require(nu_f >= 0.0 && t_c >= 0.0, ErrorKind::invalid_input, "biot: Nu_f and t_c must be >= 0");
    return nu_f * (t_c / d_i) * (k_f / k_s);
}

namespace catalog {

/// DI water at 10 °C as used for the unit-cell CFD.
inline FluidProps water_10c() { return {"water_10C", 999.7, 0.0013, 4197.0, 0.6, 10.0}; }

inline SolidProps silicon() { return {"silicon", 149.0}; }

/// The seven single-phase coolants of the coolant comparison table (reference temperature not
/// published; 25 °C is recorded).
inline std::vector<FluidProps> coolants() {
    return {
        {"water", 1000.0, 8.90e-4, 4217.0, 0.68, 25.0},
        {"coolanol_25r", 900.0, 0.009, 1750.0, 0.132, 25.0},
        {"syltherm_xlt", 850.0, 0.0014, 1600.0, 0.11, 25.0},
        {"fc77", 1800.0, 0.0011, 1100.0, 0.06, 25.0},
        {"eg_50_50", 1087.0, 0.0038, 3285.0, 0.37, 25.0},
        {"methanol_water_40_60", 935.0, 0.002, 3560.0, 0.4, 25.0},
        {"potassium_formate_acetate_40_60", 1250.0, 0.0022, 3200.0, 0.53, 25.0},
    };
}

inline std::vector<FluidProps> fluids() {
    auto all = coolants();
    all.insert(all.begin(), water_10c());
    return all;
}

inline std::optional<FluidProps> find_fluid(const std::string& name) {
    for (auto& f : fluids())
        if (f.name == name) return f;
    return std::nullopt;
}

inline std::optional<SolidProps> find_solid(const std::string& name) {
    if (name == "silicon" || name == "Si") return silicon();
    return std::nullopt;
}

inline const csv::Row& header() {
    static const csv::Row h{"name", "density_kg_m3", "viscosity_kg_ms", "cp_J_kgK", "k_W_mK", "ref_temp_C"};
    return h;
}

struct Materials {
    std::vector<FluidProps> fluids;
    std::vector<SolidProps> solids;
};

inline Materials read(std::istream& in) {
    auto table = csv::read(in);
    if (table.header != header())
        throw Error(ErrorKind::config, "material catalog header must be '" + csv::join(header()) + "'");
    Materials m;
    for (const auto& r : table.rows) {
        bool solid = r[1].empty() && r[2].empty() && r[3].empty();
        if (solid) {
            SolidProps s{r[0], csv::to_double(r[4], "k_W_mK")};
            s.validate();
            m.solids.push_back(s);
        } else {
            FluidProps f{r[0], csv::to_double(r[1], "density_kg_m3"), csv::to_double(r[2], "viscosity_kg_ms"),
                         csv::to_double(r[3], "cp_J_kgK"), csv::to_double(r[4], "k_W_mK"),
                         csv::to_double(r[5], "ref_temp_C")};
            f.validate();
            m.fluids.push_back(f);
        }
    }
    return m;
}

inline void write(std::ostream& out, const Materials& m) {
    out << csv::join(header()) << '\n';
    for (const auto& f : m.fluids)
        out << csv::join({f.name, csv::fmt(f.density), csv::fmt(f.viscosity), csv::fmt(f.specific_heat),
                          csv::fmt(f.conductivity), csv::fmt(f.reference_temp)})
            << '\n';
    for (const auto& s : m.solids) out << csv::join({s.name, "", "", "", csv::fmt(s.conductivity), ""}) << '\n';
}

}  // namespace catalog
}  // namespace jetcool
