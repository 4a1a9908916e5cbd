#pragma once

/**
 * @file correlations.hpp
 * @brief Fitted Nusselt / friction models for distributed-outlet jet arrays, the Biot
 *        correction from interface- to junction-based Nusselt number, and a catalog of
 *        literature power-law correlations.
 *
 * Inputs outside a correlation's fitted range are evaluated anyway and tagged with a
 * Warning; they never clamp and never throw.
 */

#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "jetcool/csv.hpp"
#include "jetcool/error.hpp"

namespace jetcool {

enum class Basis { junction, fluid_interface, stagnation };

inline std::string to_string(Basis b) {
    switch (b) {
    case Basis::junction: return "junction";
    case Basis::fluid_interface: return "fluid_interface";
    case Basis::stagnation: return "stagnation";
    }
    return "junction";
}

inline Basis parse_basis(const std::string& s) {
    if (s == "junction") return Basis::junction;
    if (s == "fluid_interface") return Basis::fluid_interface;
    if (s == "stagnation") return Basis::stagnation;
    throw Error(ErrorKind::config, "unknown correlation basis '" + s + "'");
}

/// Equation template of a catalog row. `huber_viskanta` multiplies the power law by
/// (H/D)^-0.123 (Xn/D)^-0.725.
enum class CorrelationForm { power_law, huber_viskanta };

inline std::string to_string(CorrelationForm f) {
    return f == CorrelationForm::power_law ? "power_law" : "huber_viskanta";
}

inline CorrelationForm parse_form(const std::string& s) {
    if (s.empty() || s == "power_law") return CorrelationForm::power_law;
    if (s == "huber_viskanta") return CorrelationForm::huber_viskanta;
    throw Error(ErrorKind::config, "unknown correlation form '" + s + "'");
}

struct PowerLawCorrelation {
    std::string label;
    double c;
    double m;
    std::optional<double> pr_exponent;
    double re_min = 0.0;
    double re_max = std::numeric_limits<double>::infinity();
    Basis basis = Basis::junction;
    CorrelationForm form = CorrelationForm::power_law;

    /// Throws on c <= 0 or m outside (0, 1); warns when m leaves the usual [0.45, 0.85] band.
    Warnings validate() const {
        require(c > 0.0, ErrorKind::invalid_input, "correlation '" + label + "': c must be > 0");
        require(m > 0.0 && m < 1.0, ErrorKind::invalid_input, "correlation '" + label + "': m must lie in (0, 1)");
        require(re_min <= re_max, ErrorKind::invalid_input, "correlation '" + label + "': re_min > re_max");
        Warnings w;
        if (m < 0.45 || m > 0.85)
            w.push_back({"exponent_atypical", "Re exponent " + csv::fmt(m) + " outside [0.45, 0.85]"});
        return w;
    }
};

template <class T>
struct Evaluated {
    T value;
    Warnings warnings;
};

struct PredictiveInputs {
    double di_over_L;
    double do_over_L;
    double H_over_L;
    double t_over_L;
    double re;
};

namespace detail {
inline void range_check(Warnings& w, double v, double lo, double hi, const char* code, const char* what) {
    if (v < lo || v > hi)
        w.push_back({code, std::string(what) + " = " + csv::fmt(v) + " outside [" + csv::fmt(lo) + ", " +
                               csv::fmt(hi) + "]"});
}
}  // namespace detail

/// Area-averaged interface Nusselt number of a distributed-outlet unit cell:
/// (5.64a² + 0.031a − 0.000632) · (H/L)^-0.29 · Re^(0.48·a^-0.16), a = d_i/L.
/// d_o/L is not an argument of the fit (it assumes d_o = d_i).
inline Evaluated<double> nu_f_predict(const PredictiveInputs& in) {
    require(in.di_over_L > 0.0 && in.H_over_L > 0.0 && in.do_over_L > 0.0, ErrorKind::invalid_input,
            "nu_f_predict: geometric ratios must be > 0");
    require(in.re >= 0.0 && std::isfinite(in.re), ErrorKind::invalid_input, "nu_f_predict: Re must be >= 0");
    const double a = in.di_over_L;
    Evaluated<double> out{0.0, {}};
    detail::range_check(out.warnings, a, 0.01, 0.4, "nu_f_di_range", "d_i/L");
    detail::range_check(out.warnings, in.re, 32.0, 2048.0, "nu_f_re_range", "Re");
    detail::range_check(out.warnings, in.H_over_L, 0.01, 0.4, "nu_f_H_range", "H/L");
    if (in.do_over_L < in.di_over_L)
        out.warnings.push_back({"nu_f_do_lt_di", "d_o/L < d_i/L; the fit assumes d_o >= d_i"});
    const double coefficient = 5.64 * a * a + 0.031 * a - 0.000632;
    out.value = coefficient * std::pow(in.H_over_L, -0.29) * std::pow(in.re, 0.48 * std::pow(a, -0.16));
    return out;
}

struct FrictionResult {
    double f;  // Δp / (½ρV̄² · t/d_i)
    double k;  // Δp / (½ρV̄²)
    Warnings warnings;
};

/// Friction factor of the unit cell and the pressure coefficient k = f·(t/d_i).
inline FrictionResult friction_predict(const PredictiveInputs& in) {
    require(in.di_over_L > 0.0 && in.H_over_L > 0.0, ErrorKind::invalid_input,
            "friction_predict: geometric ratios must be > 0");
    require(in.t_over_L > 0.0, ErrorKind::invalid_input, "friction_predict: t/L must be > 0");
    require(in.re > 0.0 && std::isfinite(in.re), ErrorKind::invalid_input, "friction_predict: Re must be > 0");
    const double a = in.di_over_L;
    FrictionResult out{0.0, 0.0, {}};
    detail::range_check(out.warnings, a, 0.05, 0.6, "f_di_range", "d_i/L");
    detail::range_check(out.warnings, in.re, 32.0, 2048.0, "f_re_range", "Re");
    if (in.t_over_L < 0.1) out.warnings.push_back({"f_t_range", "t/L = " + csv::fmt(in.t_over_L) + " < 0.1"});
    if (in.H_over_L / a < 0.2) out.warnings.push_back({"f_H_range", "H/d_i < 0.2"});
    const double t_over_di = in.t_over_L / a;
    const double re_term = (21.2 * a + 14.5) * std::pow(in.re, -0.73) * std::pow(a, -0.26) *
                           (2.26 * in.t_over_L + 0.89) * (0.37 * std::pow(in.H_over_L, 0.15) + 0.55);
    out.f = (re_term + 0.8) / t_over_di;
    out.k = out.f * t_over_di;
    return out;
}

/// g(Bi) = 1 + Bi + 0.1·Bi + 1.1·Bi²: conduction plus spreading in the die.
inline double biot_factor(double bi) {
    require(bi >= 0.0, ErrorKind::invalid_input, "biot_factor: Bi must be >= 0");
    return 1.0 + bi + (0.1 * bi + 1.1 * bi * bi);
}

/// Junction-based Nusselt number from the interface-based one.
inline double biot_correct(double nu_f, double bi) { return nu_f / biot_factor(bi); }

inline double nu_to_htc(double nu, double d_i, double k_f) {
    require(d_i > 0.0, ErrorKind::invalid_input, "nu_to_htc: d_i must be > 0");
    return nu * k_f / d_i;
}

/// Extra geometric ratios needed by multi-factor catalog forms.
struct CatalogRatios {
    std::optional<double> H_over_D;
    std::optional<double> Xn_over_D;
};

inline Evaluated<double> eval_catalog(const PowerLawCorrelation& entry, double re, std::optional<double> pr = {},
                                      const CatalogRatios& ratios = {}) {
    Evaluated<double> out{0.0, entry.validate()};
    require(re > 0.0, ErrorKind::invalid_input, "eval_catalog: Re must be > 0");
    if (re < entry.re_min || re > entry.re_max)
        out.warnings.push_back({"catalog_re_range", entry.label + ": Re = " + csv::fmt(re) + " outside [" +
                                                        csv::fmt(entry.re_min) + ", " + csv::fmt(entry.re_max) + "]"});
    double v = entry.c * std::pow(re, entry.m);
    if (entry.pr_exponent) {
        require(pr.has_value() && *pr > 0.0, ErrorKind::invalid_input,
                "eval_catalog: '" + entry.label + "' needs a Prandtl number");
        v *= std::pow(*pr, *entry.pr_exponent);
    }
    if (entry.form == CorrelationForm::huber_viskanta) {
        require(ratios.H_over_D && ratios.Xn_over_D, ErrorKind::invalid_input,
                "eval_catalog: '" + entry.label + "' needs H/D and Xn/D");
        v *= std::pow(*ratios.H_over_D, -0.123) * std::pow(*ratios.Xn_over_D, -0.725);
    }
    out.value = v;
    return out;
}

struct PowerLawFit {
    double c;
    double m;
    double residual_norm;  // ‖ln(nu) − ln(c) − m·ln(Re)‖₂
};

/// Least squares on ln(nu) = ln(c) + m·ln(Re).
inline PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
    std::set<double> distinct;
    for (auto [re, nu] : points) {
        require(re > 0.0 && nu > 0.0, ErrorKind::invalid_input, "fit_power_law: points must be positive");
        distinct.insert(re);
    }
    require(distinct.size() >= 2, ErrorKind::underdetermined, "fit_power_law: needs >= 2 distinct Re values");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (auto [re, nu] : points) {
        mx += std::log(re);
        my += std::log(nu);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (auto [re, nu] : points) {
        const double dx = std::log(re) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(nu) - my);
    }
    const double m = sxy / sxx;
    const double lnc = my - m * mx;
    double r2 = 0.0;
    for (auto [re, nu] : points) {
        const double r = std::log(nu) - lnc - m * std::log(re);
        r2 += r * r;
    }
    return {std::exp(lnc), m, std::sqrt(r2)};
}

namespace correlation_catalog {

inline constexpr double kFitReMin = 10.0;
inline constexpr double kFitReMax = 3500.0;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::vector<PowerLawCorrelation> builtin() {
    using B = Basis;
    return {
        {"single_jet", 0.54, 0.56, {}, kFitReMin, kFitReMax, B::junction},
        {"array_4x4_distributed", 1.63, 0.57, {}, kFitReMin, kFitReMax, B::junction},
        {"array_4x4_common_outlet", 1.34, 0.59, {}, kFitReMin, kFitReMax, B::junction},
        {"array_8x8", 1.24, 0.67, {}, kFitReMin, kFitReMax, B::junction},
        {"vertical_feed", 0.49, 0.65, {}, kFitReMin, kFitReMax, B::junction},
        {"lateral_feed", 0.49, 0.64, {}, kFitReMin, kFitReMax, B::junction},
        {"brunschwiler", 0.78, 0.73, {}, 0.0, 800.0, B::junction},
        {"hoberg", 0.36, 0.59, {}, 500.0, 10000.0, B::fluid_interface},
        {"onstad_1", 0.376, 0.586, 1.0 / 3.0, 0.0, kInf, B::fluid_interface},
        {"onstad_2", 0.436, 0.579, 1.0 / 3.0, 0.0, kInf, B::fluid_interface},
        {"onstad_3", 0.602, 0.531, 1.0 / 3.0, 0.0, kInf, B::fluid_interface},
        {"huber_viskanta", 0.285, 0.710, 0.33, 3400.0, 20500.0, B::fluid_interface, CorrelationForm::huber_viskanta},
    };
}

inline const PowerLawCorrelation& find(const std::vector<PowerLawCorrelation>& entries, const std::string& label) {
    for (const auto& e : entries)
        if (e.label == label) return e;
    throw Error(ErrorKind::invalid_input, "no correlation labelled '" + label + "'");
}

inline const csv::Row& header() {
    static const csv::Row h{"label", "c", "m", "pr_exponent", "re_min", "re_max", "basis", "form"};
    return h;
}

inline std::vector<PowerLawCorrelation> read(std::istream& in) {
    auto t = csv::read(in);
    std::vector<PowerLawCorrelation> out;
    const bool has_form = t.header.size() == header().size();
    csv::Row expect = header();
    if (!has_form) expect.pop_back();
    if (t.header != expect) throw Error(ErrorKind::config, "correlation catalog header must be '" + csv::join(header()) + "'");
    for (const auto& r : t.rows) {
        PowerLawCorrelation e{r[0], csv::to_double(r[1], "c"), csv::to_double(r[2], "m"), {},
                              csv::to_double(r[4], "re_min"), csv::to_double(r[5], "re_max"), parse_basis(r[6]),
                              has_form ? parse_form(r[7]) : CorrelationForm::power_law};
        if (!r[3].empty()) e.pr_exponent = csv::to_double(r[3], "pr_exponent");
        e.validate();
        out.push_back(e);
    }
    return out;
}

inline void write(std::ostream& out, const std::vector<PowerLawCorrelation>& entries) {
    out << csv::join(header()) << '\n';
    for (const auto& e : entries)
        out << csv::join({e.label, csv::fmt(e.c), csv::fmt(e.m), e.pr_exponent ? csv::fmt(*e.pr_exponent) : "",
                          csv::fmt(e.re_min), csv::fmt(e.re_max), to_string(e.basis), to_string(e.form)})
            << '\n';
}

}  // namespace correlation_catalog
}  // namespace jetcool
