#pragma once

/**
 * @file explorer.hpp
 * @brief Design-space sweeps under flow / pressure / pump-power constraints, Pareto
 *        extraction, COP maps, hotspot scaling and hotspot-targeted nozzle synthesis.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jetcool/csv.hpp"
#include "jetcool/error.hpp"
#include "jetcool/geometry.hpp"
#include "jetcool/performance.hpp"
#include "jetcool/props.hpp"
#include "jetcool/rootfind.hpp"
#include "jetcool/units.hpp"

namespace jetcool {

inline std::vector<double> linspace(double lo, double hi, int count) {
    require(count >= 1, ErrorKind::invalid_input, "linspace: count must be >= 1");
    if (count == 1) return {lo};
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * i / (count - 1);
    v.back() = hi;
    return v;
}

struct DesignSpace {
    std::vector<int> n_values;
    std::vector<double> di_over_L;
    std::vector<double> do_over_L;  // empty: d_o = d_i
    std::vector<double> H_over_L;
    std::vector<double> t_over_L;
    double chip_side;        // m
    double t_c;              // m
    FluidProps fluid;
    SolidProps solid;
    double heated_fraction = 0.75;
    double inlet_temp = 10.0;
    double dT_max_allow = 60.0;

    std::size_t size() const {
        const std::size_t ndo = do_over_L.empty() ? 1 : do_over_L.size();
        return n_values.size() * di_over_L.size() * ndo * H_over_L.size() * t_over_L.size();
    }
};

enum class ConstraintKind { const_pressure, const_flow, const_pump };

inline std::string to_string(ConstraintKind k) {
    switch (k) {
    case ConstraintKind::const_pressure: return "const_pressure";
    case ConstraintKind::const_flow: return "const_flow";
    case ConstraintKind::const_pump: return "const_pump";
    }
    return "const_flow";
}

inline ConstraintKind parse_constraint(const std::string& s) {
    if (s == "const_pressure") return ConstraintKind::const_pressure;
    if (s == "const_flow") return ConstraintKind::const_flow;
    if (s == "const_pump") return ConstraintKind::const_pump;
    throw Error(ErrorKind::config, "unknown constraint mode '" + s + "'");
}

/// Target in Pa, m³/s or W. With `per_cm2` the value is per cm² of chip area and is scaled by
/// the chip area (pressure is never area-scaled).
struct ConstraintMode {
    ConstraintKind kind;
    double value;
    bool per_cm2 = false;

    double absolute(double chip_area_m2) const {
        if (!per_cm2 || kind == ConstraintKind::const_pressure) return value;
        return value * units::m2_to_cm2(chip_area_m2);
    }
};

struct SweepRow {
    int n;
    double di_over_L;
    double do_over_L;
    double H_over_L;
    double t_over_L;
    double flow_total;  // m³/s, 0 when not solved
    std::string status; // ok | infeasible | invalid
    PerformanceReport report{};
    std::string message;
};

inline SweepRow evaluate_row(const DesignSpace& space, const ConstraintMode& mode, int n, double di, double d_o,
                             double h, double t) {
    SweepRow row{n, di, d_o, h, t, 0.0, "ok", {}, {}};
    try {
        const auto array = array_from_ratios(space.chip_side, n, di, d_o, h, t, space.t_c, space.heated_fraction);
        ReportOptions opt;
        opt.dT_max_allow = space.dT_max_allow;
        OperatingPoint op{0.0, space.inlet_temp, 0.0, 25.0};
        const double target = mode.absolute(array.chip_area());
        require(target > 0.0, ErrorKind::invalid_input, "constraint value must be > 0");
        switch (mode.kind) {
        case ConstraintKind::const_flow: op.flow_total = target; break;
        case ConstraintKind::const_pressure:
            op.flow_total = flow_for_pressure(array, space.fluid, space.solid, op, target, opt);
            break;
        case ConstraintKind::const_pump:
            op.flow_total = flow_for_pump_power(array, space.fluid, space.solid, op, target, opt);
            break;
        }
        row.flow_total = op.flow_total;
        row.report = evaluate_design(array, space.fluid, space.solid, op, opt);
    } catch (const Error& e) {
        const bool input = exit_code(e.kind()) == 2;
        row.status = input ? "invalid" : "infeasible";
        row.message = e.what();
    }
    return row;
}

/// One row per design, in enumeration order n, d_i/L, d_o/L, H/L, t/L. Failed solves are kept
/// as flagged rows.
inline std::vector<SweepRow> sweep(const DesignSpace& space, const ConstraintMode& mode) {
    require(space.size() > 0, ErrorKind::invalid_input, "design space is empty");
    require(mode.value > 0.0, ErrorKind::invalid_input, "constraint value must be > 0");
    std::vector<SweepRow> rows;
    rows.reserve(space.size());
    for (int n : space.n_values)
        for (double di : space.di_over_L) {
            const std::vector<double> dos = space.do_over_L.empty() ? std::vector<double>{di} : space.do_over_L;
            for (double d_o : dos)
                for (double h : space.H_over_L)
                    for (double t : space.t_over_L) rows.push_back(evaluate_row(space, mode, n, di, d_o, h, t));
        }
    return rows;
}

inline const csv::Row& sweep_header() {
    static const csv::Row h{"n",     "di_over_L", "do_over_L",  "H_over_L",  "t_over_L", "flow_mlpm",
                            "re",    "nu_f",      "nu_j",       "htc_W_m2K", "r_th_K_W", "r_star_Kcm2_W",
                            "dp_Pa", "wp_W",      "cop",        "status",    "warnings"};
    return h;
}

inline std::string warning_codes(const Warnings& ws) {
    std::string out;
    for (const auto& w : ws) {
        if (!out.empty()) out.push_back(';');
        out += w.code;
    }
    return out;
}

inline void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << csv::join(sweep_header()) << '\n';
    for (const auto& r : rows) {
        csv::Row line{std::to_string(r.n), csv::fmt(r.di_over_L), csv::fmt(r.do_over_L), csv::fmt(r.H_over_L),
                      csv::fmt(r.t_over_L)};
        if (r.status == "ok") {
            const auto& p = r.report;
            for (double v : {units::m3s_to_mlpm(r.flow_total), p.re, p.nu_f, p.nu_j, p.htc, p.r_th, p.r_star, p.dp,
                             p.w_p, p.cop})
                line.push_back(csv::fmt(v));
            line.push_back(r.status);
            line.push_back(warning_codes(p.warnings));
        } else {
            for (int i = 0; i < 10; ++i) line.push_back("");
            line.push_back(r.status);
            line.push_back(r.message);
        }
        out << csv::join(line) << '\n';
    }
}

struct ParetoPoint {
    double r_th;
    double w_p;
};

/// Indices of the non-dominated points (minimize both), ordered by w_p ascending. Of several
/// identical points only the first occurrence is kept.
inline std::vector<std::size_t> pareto_front(const std::vector<ParetoPoint>& pts) {
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a].w_p != pts[b].w_p) return pts[a].w_p < pts[b].w_p;
        return pts[a].r_th < pts[b].r_th;
    });
    std::vector<std::size_t> front;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : idx) {
        if (pts[i].r_th < best) {
            front.push_back(i);
            best = pts[i].r_th;
        }
    }
    return front;
}

struct CopNode {
    int n;
    double nozzle_density;  // cm⁻²
    double H_over_L;
    double cavity_height;   // m
    double cop;
    std::string status;
};

/// COP over (nozzle density, H/L) at fixed total flow; other ratios take their first value.
inline std::vector<CopNode> cop_surface(const DesignSpace& space, double flow) {
    require(flow > 0.0, ErrorKind::invalid_input, "cop_surface: flow must be > 0");
    require(!space.n_values.empty() && !space.H_over_L.empty() && !space.di_over_L.empty() &&
                !space.t_over_L.empty(),
            ErrorKind::invalid_input, "cop_surface: design space is empty");
    const double di = space.di_over_L.front();
    const double d_o = space.do_over_L.empty() ? di : space.do_over_L.front();
    const double t = space.t_over_L.front();
    std::vector<CopNode> out;
    for (int n : space.n_values)
        for (double h : space.H_over_L) {
            const auto row = evaluate_row(space, {ConstraintKind::const_flow, flow}, n, di, d_o, h, t);
            const double L = space.chip_side / n;
            out.push_back({n, n * n / units::m2_to_cm2(space.chip_side * space.chip_side), h, h * L,
                           row.status == "ok" ? row.report.cop : 0.0, row.status});
        }
    return out;
}

struct HotspotScale {
    double m;
    double htc_star;
    double flow_star;
    double dp_ratio;
};

/// Concentrating the same total flow on fewer nozzles: m = N²/M, htc* = m^0.67·htc, V* = m·V.
inline HotspotScale hotspot_scale(double base_htc, double base_flow_per_nozzle, int n_sq, int m_nozzles) {
    require(m_nozzles >= 1, ErrorKind::invalid_input, "hotspot_scale: need at least one nozzle");
    require(n_sq >= m_nozzles, ErrorKind::invalid_input, "hotspot_scale: n_sq must be >= m_nozzles");
    const double m = static_cast<double>(n_sq) / m_nozzles;
    return {m, std::pow(m, 0.67) * base_htc, m * base_flow_per_nozzle, m * m};
}

/// htc = c·d^a·m^(b0 + b1·d) and Δp = c_dp·d^e_d·m^e_m, with d in mm and m in mL/min.
struct HotspotModel {
    double c_htc = 8440.0;
    double a = -0.4157;
    double b0 = 0.7843;
    double b1 = -0.6624;
    double c_dp = 0.655;
    double e_d = -4.0;
    double e_m = 1.76;
    double pitch = 1e-3;  // m, pitch the constants were fitted for

    double htc(double d_mm, double m_mlpm) const {
        return c_htc * std::pow(d_mm, a) * std::pow(m_mlpm, b0 + b1 * d_mm);
    }
    double dp(double d_mm, double m_mlpm) const { return c_dp * std::pow(d_mm, e_d) * std::pow(m_mlpm, e_m); }
    /// Nozzle flow at pressure drop `dp` (inverse of the Δp fit).
    double flow(double d_mm, double dp_value) const {
        return std::pow(dp_value / (c_dp * std::pow(d_mm, e_d)), 1.0 / e_m);
    }
};

struct HotspotSample {
    double d_mm;
    double m_mlpm;
    double htc;
    double dp = 0.0;  // 0: no pressure sample
};

/// Least squares in logs for both fits. The Δp fit is skipped unless every sample has dp > 0.
inline HotspotModel fit_htc_model(const std::vector<HotspotSample>& samples, double pitch) {
    require(samples.size() >= 4, ErrorKind::underdetermined, "fit_htc_model: needs >= 4 samples");
    require(pitch > 0.0, ErrorKind::invalid_input, "fit_htc_model: pitch must be > 0");
    const auto n = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd A(n, 4);
    Eigen::VectorXd y(n);
    bool with_dp = true;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        require(s.d_mm > 0.0 && s.m_mlpm > 0.0 && s.htc > 0.0, ErrorKind::invalid_input,
                "fit_htc_model: samples must be positive");
        const double lm = std::log(s.m_mlpm);
        A.row(i) << 1.0, std::log(s.d_mm), lm, s.d_mm * lm;
        y(i) = std::log(s.htc);
        with_dp = with_dp && s.dp > 0.0;
    }
    auto qr = A.colPivHouseholderQr();
    require(qr.rank() == 4, ErrorKind::underdetermined, "fit_htc_model: samples do not span d and m");
    const Eigen::Vector4d x = qr.solve(y);
    HotspotModel m;
    m.c_htc = std::exp(x(0));
    m.a = x(1);
    m.b0 = x(2);
    m.b1 = x(3);
    m.pitch = pitch;
    if (with_dp) {
        Eigen::MatrixXd B(n, 3);
        Eigen::VectorXd z(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& s = samples[static_cast<std::size_t>(i)];
            B.row(i) << 1.0, std::log(s.d_mm), std::log(s.m_mlpm);
            z(i) = std::log(s.dp);
        }
        auto qb = B.colPivHouseholderQr();
        require(qb.rank() == 3, ErrorKind::underdetermined, "fit_htc_model: pressure samples are degenerate");
        const Eigen::Vector3d w = qb.solve(z);
        m.c_dp = std::exp(w(0));
        m.e_d = w(1);
        m.e_m = w(2);
    }
    return m;
}

struct PowerMap {
    int rows;
    int cols;
    double pitch;                 // m
    std::vector<double> density;  // W/cm², row-major

    double at(int r, int c) const { return density[static_cast<std::size_t>(r * cols + c)]; }
    void validate() const {
        require(rows >= 1 && cols >= 1, ErrorKind::invalid_input, "power map needs at least one cell");
        require(density.size() == static_cast<std::size_t>(rows * cols), ErrorKind::invalid_input,
                "power map size does not match rows x cols");
        require(pitch > 0.0, ErrorKind::invalid_input, "power map pitch must be > 0");
        for (double q : density)
            require(std::isfinite(q) && q >= 0.0, ErrorKind::invalid_input, "power densities must be >= 0");
    }
    double total_power() const {
        const double cell_cm2 = units::m2_to_cm2(pitch * pitch);
        double s = 0.0;
        for (double q : density) s += q * cell_cm2;
        return s;
    }
};

struct NozzleCell {
    int row;
    int col;
    double power_density;  // W/cm²
    double d;              // m, 0 = no inlet nozzle
    double flow;           // m³/s
    double htc;            // W/(m²·K)
    double htc_required;   // W/(m²·K)
    std::string status;    // ok | no_nozzle | clamped_min | unreachable
};

struct NozzlePlan {
    std::vector<NozzleCell> cells;
    double dp;          // in the fit's pressure unit
    double flow_total;  // m³/s
    Warnings warnings;

    std::vector<std::size_t> flagged() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (cells[i].status == "unreachable") out.push_back(i);
        return out;
    }
};

struct DiameterBounds {
    double d_min;  // m
    double d_max;  // m
};

namespace detail {

struct CellSolve {
    double d_mm;
    double m_mlpm;
    double htc;
    const char* status;
};

/// Smallest diameter in bounds whose nozzle, at the common pressure drop, reaches htc_req.
/// htc(d) at fixed Δp rises to a single peak and falls again; a missed crossing near the peak
/// is caught by refining the sampled maximum.
inline CellSolve solve_cell(const HotspotModel& model, double dp, double htc_req, double lo_mm, double hi_mm) {
    auto achieved = [&](double d) { return model.htc(d, model.flow(d, dp)); };
    auto crossing = [&](double a, double b) {
        BisectionOptions tight;
        tight.tolerance = 1e-14;
        auto root = bisect([&](double x) { return achieved(x) / htc_req - 1.0; }, a, b, tight);
        const double x = root ? root->x : b;
        return CellSolve{x, model.flow(x, dp), achieved(x), "ok"};
    };
    constexpr int kSamples = 48;
    const double step = std::log(hi_mm / lo_mm) / (kSamples - 1);
    auto at = [&](int i) { return i == kSamples - 1 ? hi_mm : lo_mm * std::exp(step * i); };
    const double h0 = achieved(lo_mm);
    if (h0 >= htc_req) return {lo_mm, model.flow(lo_mm, dp), h0, "clamped_min"};
    int best = 0;
    double best_h = h0;
    for (int i = 1; i < kSamples; ++i) {
        const double h = achieved(at(i));
        if (h >= htc_req) return crossing(at(i - 1), at(i));
        if (h > best_h) {
            best_h = h;
            best = i;
        }
    }
    // Golden-section refinement of the peak between the neighbours of the best sample.
    double a = at(std::max(best - 1, 0)), b = at(std::min(best + 1, kSamples - 1));
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double hc = achieved(c), hd = achieved(d);
    for (int it = 0; it < 100 && b - a > 1e-12 * b; ++it) {
        if (hc > hd) {
            b = d;
            d = c;
            hd = hc;
            c = b - g * (b - a);
            hc = achieved(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + g * (b - a);
            hd = achieved(d);
        }
    }
    const double peak = hc > hd ? c : d;
    const double peak_h = std::max(hc, hd);
    if (peak_h >= htc_req) return crossing(at(std::max(best - 1, 0)), peak);
    if (peak_h > best_h) return {peak, model.flow(peak, dp), peak_h, "unreachable"};
    return {at(best), model.flow(at(best), dp), best_h, "unreachable"};
}

}  // namespace detail

/// Nozzle diameters so every powered cell reaches q″/dT_target, with all inlets on one plenum
/// (equal Δp) and the plenum pressure set so the nozzle flows add up to `flow_total`.
///
/// The summed flow is not monotone in Δp: at low Δp the hot cells need near-peak diameters, at
/// high Δp every cell sits at d_min. All roots on a log scan are refined; the plan keeps the
/// one with the fewest unreachable cells, then the lowest Δp. The fitted constants carry the
/// coolant; `fluid` is validated only.
inline NozzlePlan hotspot_synthesize(const PowerMap& map, double flow_total, double dT_target,
                                     const FluidProps& fluid, const DiameterBounds& bounds,
                                     const HotspotModel& model = {}) {
    map.validate();
    fluid.validate();
    require(map.total_power() > 0.0, ErrorKind::invalid_input, "power map carries no power");
    require(flow_total > 0.0, ErrorKind::invalid_input, "total flow must be > 0");
    require(dT_target > 0.0, ErrorKind::invalid_input, "temperature target must be > 0");
    require(bounds.d_min > 0.0 && bounds.d_max > bounds.d_min, ErrorKind::invalid_input,
            "diameter bounds must satisfy 0 < d_min < d_max");
    require(std::abs(map.pitch - model.pitch) <= 1e-9 * model.pitch, ErrorKind::invalid_model,
            "nozzle model was fitted for pitch " + csv::fmt(model.pitch * 1e3) + " mm, map pitch is " +
                csv::fmt(map.pitch * 1e3) + " mm; supply constants fitted for this pitch");

    const double lo_mm = bounds.d_min / units::mm;
    const double hi_mm = bounds.d_max / units::mm;
    const double q_total = units::m3s_to_mlpm(flow_total);

    std::vector<double> levels(map.density);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::vector<std::size_t> count(levels.size(), 0);
    for (double q : map.density)
        ++count[static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), q) - levels.begin())];

    struct Total {
        double flow;
        int unreachable;
    };
    auto total = [&](double dp) {
        Total t{0.0, 0};
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (levels[i] == 0.0) continue;
            const auto s = detail::solve_cell(model, dp, levels[i] * 1e4 / dT_target, lo_mm, hi_mm);
            t.flow += s.m_mlpm * static_cast<double>(count[i]);
            if (std::string(s.status) == "unreachable") t.unreachable += static_cast<int>(count[i]);
        }
        return t;
    };
    auto residual = [&](double log_dp) { return total(std::exp(log_dp)).flow / q_total - 1.0; };

    BisectionOptions opt;
    opt.tolerance = 1e-10;
    const double log_lo = std::log(1e-3), log_hi = std::log(1e10);
    constexpr int kScan = 260;
    double best_dp = -1.0;
    int best_unreachable = 0;
    double a = log_lo, ra = residual(a);
    for (int k = 1; k <= kScan; ++k) {
        const double b = log_lo + (log_hi - log_lo) * k / kScan;
        const double rb = residual(b);
        if (std::signbit(ra) != std::signbit(rb) || rb == 0.0) {
            auto root = bisect(residual, a, b, opt);
            if (root && std::abs(root->residual) <= 1e-7) {
                const double dp = std::exp(root->x);
                const int unreachable = total(dp).unreachable;
                if (best_dp < 0.0 || unreachable < best_unreachable) {
                    best_dp = dp;
                    best_unreachable = unreachable;
                }
            }
        }
        a = b;
        ra = rb;
    }
    require(best_dp > 0.0, ErrorKind::infeasible, "no plenum pressure delivers the requested total flow");

    NozzlePlan plan{{}, best_dp, 0.0, {}};
    for (int r = 0; r < map.rows; ++r)
        for (int c = 0; c < map.cols; ++c) {
            const double q = map.at(r, c);
            const double req = q * 1e4 / dT_target;
            if (q == 0.0) {
                plan.cells.push_back({r, c, q, 0.0, 0.0, 0.0, 0.0, "no_nozzle"});
                continue;
            }
            const auto s = detail::solve_cell(model, best_dp, req, lo_mm, hi_mm);
            plan.cells.push_back({r, c, q, s.d_mm * units::mm, units::mlpm_to_m3s(s.m_mlpm), s.htc, req, s.status});
            plan.flow_total += plan.cells.back().flow;
            if (std::string(s.status) == "unreachable")
                plan.warnings.push_back({"htc_unreachable", "cell (" + std::to_string(r) + "," + std::to_string(c) +
                                                                ") cannot reach the required htc within bounds"});
        }
    return plan;
}

inline const csv::Row& nozzle_plan_header() {
    static const csv::Row h{"row", "col", "power_W_cm2", "d_mm", "m_nz_mlpm", "htc_W_m2K"};
    return h;
}

inline void write_nozzle_plan(std::ostream& out, const NozzlePlan& plan) {
    out << csv::join(nozzle_plan_header()) << '\n';
    for (const auto& c : plan.cells)
        out << csv::join({std::to_string(c.row), std::to_string(c.col), csv::fmt(c.power_density),
                          csv::fmt(c.d / units::mm), csv::fmt(units::m3s_to_mlpm(c.flow)), csv::fmt(c.htc)})
            << '\n';
}

}  // namespace jetcool
