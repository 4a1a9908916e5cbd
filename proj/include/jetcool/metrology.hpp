#pragma once

/**
 * @file metrology.hpp
 * @brief Experimental data reduction: sensor readings to temperature rise, thermal resistance
 *        and heat transfer coefficient with heat-loss and conduction corrections; RSS
 *        uncertainty; three-level grid convergence index.
 *
 * All temperatures are rises relative to the power-off / inlet reference.
 */

#include <cmath>
#include <initializer_list>
#include <istream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "jetcool/csv.hpp"
#include "jetcool/error.hpp"

namespace jetcool {

struct DiodeModel {
    double sensitivity = -1.55;  // mV/°C
};

struct TcrModel {
    double r0 = 100.0;        // Ω, used when no per-cell power-off reading exists
    double tcr = 3553e-6;     // 1/°C
    double ref_temp = 25.0;   // °C
};

using SensorModel = std::variant<DiodeModel, TcrModel>;

struct SensorReading {
    int row;
    int col;
    double on;   // mV (diode) or Ω (tcr) with power applied
    double off;  // same, power off
};

struct SensorMap {
    SensorModel model = DiodeModel{};
    double pitch = 0.0;  // m, optional geometry link
    std::vector<SensorReading> readings;
};

/// Temperature rise of one sensor: (V_on − V_off)/σ for diodes, (R − R0)/(R0·TCR) for resistors.
inline double sensor_delta_t(const SensorModel& model, double on, double off) {
    require(std::isfinite(on) && std::isfinite(off), ErrorKind::invalid_input, "sensor readings must be finite");
    if (const auto* d = std::get_if<DiodeModel>(&model)) {
        require(d->sensitivity != 0.0 && std::isfinite(d->sensitivity), ErrorKind::invalid_model,
                "diode sensitivity must be nonzero");
        return (on - off) / d->sensitivity;
    }
    const auto& t = std::get<TcrModel>(model);
    require(off * t.tcr != 0.0 && std::isfinite(off * t.tcr), ErrorKind::invalid_model, "R0·TCR must be nonzero");
    return (on - off) / (off * t.tcr);
}

/// ΔT per reading, in input order.
inline std::vector<double> sensor_to_dT(const SensorMap& map) {
    require(!map.readings.empty(), ErrorKind::invalid_input, "sensor map is empty");
    std::vector<double> out;
    out.reserve(map.readings.size());
    for (const auto& r : map.readings) out.push_back(sensor_delta_t(map.model, r.on, r.off));
    return out;
}

/// Same with a separate power-off reference map; `on` and `reference` must match in shape.
inline std::vector<double> sensor_to_dT(const SensorModel& model, const std::vector<double>& on,
                                        const std::vector<double>& reference) {
    require(!on.empty(), ErrorKind::invalid_input, "sensor map is empty");
    require(on.size() == reference.size(), ErrorKind::invalid_input, "reference map shape differs from readings");
    std::vector<double> out(on.size());
    for (std::size_t i = 0; i < on.size(); ++i) out[i] = sensor_delta_t(model, on[i], reference[i]);
    return out;
}

struct ChipStack {
    double t_c;          // m
    double k_s;          // W/(m·K)
    double heated_area;  // m²
};

struct Reduction {
    double dT_avg;    // K over inlet
    double t_chip;    // °C
    double r_th;      // K/W
    double q_loss;    // W
    double q_net;     // W
    double t_s;       // °C, wetted-surface temperature
    double htc;       // W/(m²·K)
};

/// Chip-average rise → R_th; loss through the board via R_loss; 1D conduction to the wetted
/// surface; area-averaged htc against the inlet temperature.
inline Reduction reduce(const std::vector<double>& dT, double power, double t_amb, double t_in, double r_loss,
                        const ChipStack& chip) {
    require(!dT.empty(), ErrorKind::invalid_input, "reduce: no temperature data");
    require(power > 0.0, ErrorKind::invalid_input, "reduce: power must be > 0");
    require(r_loss > 0.0, ErrorKind::invalid_input, "reduce: R_loss must be > 0");
    require(chip.t_c >= 0.0 && chip.k_s > 0.0 && chip.heated_area > 0.0, ErrorKind::invalid_input,
            "reduce: chip stack needs t_c >= 0, k_s > 0, area > 0");
    double sum = 0.0;
    for (double v : dT) {
        require(std::isfinite(v), ErrorKind::invalid_input, "reduce: non-finite temperature");
        sum += v;
    }
    Reduction r{};
    r.dT_avg = sum / static_cast<double>(dT.size());
    r.t_chip = t_in + r.dT_avg;
    r.r_th = r.dT_avg / power;
    r.q_loss = (r.t_chip - t_amb) / r_loss;
    r.q_net = power - r.q_loss;
    r.t_s = r.t_chip - r.q_net * chip.t_c / (chip.heated_area * chip.k_s);
    require(r.t_s > t_in, ErrorKind::non_physical,
            "reduced surface temperature " + csv::fmt(r.t_s) + " °C is not above the inlet temperature");
    r.htc = r.q_net / (chip.heated_area * (r.t_s - t_in));
    return r;
}

struct UncertaintyComponent {
    std::string name;
    double relative;
};

using UncertaintyBudget = std::vector<UncertaintyComponent>;

/// Root-sum-square of relative uncertainties.
inline double propagate(const UncertaintyBudget& budget) {
    require(!budget.empty(), ErrorKind::invalid_input, "uncertainty budget is empty");
    double s = 0.0;
    for (const auto& c : budget) {
        require(c.relative >= 0.0 && std::isfinite(c.relative), ErrorKind::invalid_input,
                "uncertainty component '" + c.name + "' must be >= 0");
        s += c.relative * c.relative;
    }
    return std::sqrt(s);
}

inline double propagate(const std::vector<double>& components) {
    UncertaintyBudget b;
    for (double c : components) b.push_back({"", c});
    return propagate(b);
}

inline double propagate(std::initializer_list<double> components) {
    return propagate(std::vector<double>(components));
}

struct GciResult {
    double p;
    double gci12;
    double gci23;
    double asymptotic_ratio;
    bool in_asymptotic_range;
};

inline bool in_asymptotic_range(double ratio, double tol = 0.05) { return std::abs(ratio - 1.0) <= tol; }

/// Three-level grid convergence index, f1 on the finest grid. Both indices are normalized by
/// f2, so the asymptotic ratio GCI23/(r^p·GCI12) is 1 whenever p is observed from the same triple.
inline GciResult gci(double f1, double f2, double f3, double r, double fs = 1.25, double range_tol = 0.05) {
    require(std::isfinite(f1) && std::isfinite(f2) && std::isfinite(f3), ErrorKind::invalid_input,
            "gci: values must be finite");
    require(r > 1.0, ErrorKind::invalid_input, "gci: refinement ratio must be > 1");
    require(fs > 0.0, ErrorKind::invalid_input, "gci: safety factor must be > 0");
    require(f2 != 0.0, ErrorKind::invalid_input, "gci: f2 must be nonzero");
    const double e12 = f2 - f1;
    const double e23 = f3 - f2;
    require(e12 != 0.0 && e23 != 0.0 && std::signbit(e12) == std::signbit(e23), ErrorKind::non_monotone_convergence,
            "gci: differences must be nonzero and of equal sign (oscillatory convergence is not supported)");
    GciResult g{};
    g.p = std::log(e23 / e12) / std::log(r);
    require(g.p > 0.0, ErrorKind::non_monotone_convergence, "gci: differences do not shrink under refinement");
    const double rp = std::pow(r, g.p);
    const double factor = fs * rp / (rp - 1.0);
    g.gci23 = factor * std::abs(e23 / f2);
    g.gci12 = factor * std::abs(e12 / f2);
    g.asymptotic_ratio = g.gci23 / (rp * g.gci12);
    g.in_asymptotic_range = in_asymptotic_range(g.asymptotic_ratio, range_tol);
    return g;
}

/// Sensor CSV `row,col,reading_on,reading_off` preceded by `# key=value` header lines.
struct SensorDataset {
    SensorMap map;
    std::map<std::string, std::string> params;

    double number(const std::string& key) const {
        auto it = params.find(key);
        require(it != params.end(), ErrorKind::config, "dataset header lacks '" + key + "'");
        return csv::to_double(it->second, key);
    }
    double number_or(const std::string& key, double fallback) const {
        return params.count(key) ? number(key) : fallback;
    }
};

inline const csv::Row& sensor_header() {
    static const csv::Row h{"row", "col", "reading_on", "reading_off"};
    return h;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

inline SensorDataset read_sensor_dataset(std::istream& in) {
    std::vector<std::string> comments;
    const auto t = csv::read(in, &comments);
    if (t.header != sensor_header())
        throw Error(ErrorKind::config, "sensor CSV header must be '" + csv::join(sensor_header()) + "'");
    SensorDataset ds;
    for (const auto& c : comments) {
        const auto eq = c.find('=');
        if (eq == std::string::npos) continue;
        ds.params[trim(c.substr(0, eq))] = trim(c.substr(eq + 1));
    }
    const std::string model = ds.params.count("model") ? ds.params["model"] : "diode";
    if (model == "diode") {
        ds.map.model = DiodeModel{ds.number_or("sensitivity_mV_C", -1.55)};
    } else if (model == "tcr") {
        ds.map.model = TcrModel{ds.number_or("r0_ohm", 100.0), ds.number_or("tcr_ppm_C", 3553.0) * 1e-6,
                                ds.number_or("ref_temp_C", 25.0)};
    } else {
        throw Error(ErrorKind::config, "unknown sensor model '" + model + "'");
    }
    ds.map.pitch = ds.number_or("pitch_mm", 0.0) * 1e-3;
    const auto* tcr = std::get_if<TcrModel>(&ds.map.model);
    for (const auto& r : t.rows) {
        // A resistor row may leave reading_off blank; the dataset R0 then applies.
        const double off = (tcr && trim(r[3]).empty()) ? tcr->r0 : csv::to_double(r[3], "reading_off");
        ds.map.readings.push_back({static_cast<int>(csv::to_double(r[0], "row")),
                                   static_cast<int>(csv::to_double(r[1], "col")), csv::to_double(r[2], "reading_on"),
                                   off});
    }
    require(!ds.map.readings.empty(), ErrorKind::invalid_input, "sensor dataset has no readings");
    return ds;
}

}  // namespace jetcool
