#pragma once

/**
 * @file benchmark.hpp
 * @brief Literature cooler fixture and its area-normalized (R·A, W_p/A) comparison points.
 *
 * Fixture cells keep the printed text with units; numbers are pulled out by pattern when the
 * comparison is built. Thermal metric precedence: R_avg (area-normalized if its unit carries
 * cm², otherwise multiplied by the chip area), then 1/h_avg. Pump power precedence: the
 * reported pump power, then Δp·flow.
 */

#include <istream>
#include <optional>
#include <ostream>
#include <regex>
#include <string>
#include <vector>

#include "jetcool/csv.hpp"
#include "jetcool/error.hpp"
#include "jetcool/geometry.hpp"
#include "jetcool/units.hpp"

namespace jetcool {

struct BenchmarkEntry {
    std::string tag;
    std::string material;
    std::string year;
    std::string authors;
    std::string application;
    std::string coolant;
    std::string jets;
    std::string nozzle_diameter;
    std::string chip_area;
    std::string power;
    std::string hydraulics;  // flow rate / pressure drop / pump power as printed
    std::string thermal;     // reported thermal performance as printed
};

inline const csv::Row& benchmark_fixture_header() {
    static const csv::Row h{"tag",  "material",  "year",  "authors",    "application", "coolant",
                            "jets", "nozzle_diameter", "chip_area", "power", "hydraulics", "thermal"};
    return h;
}

/// Review table of state-of-the-art impingement coolers, parts 1 and 2.
inline std::vector<BenchmarkEntry> benchmark_table1() {
    return {
        {"wang2004", "Si", "2004", "E.N. Wang", "TTV", "Water/ T_in=23 °C", "4", "76 μm", "1 cm²", "4W",
         "FL=8 mL/min Δp = 47.57 KPa", "h_max=4.4 W/(cm² K)"},
        {"browne2010", "Si", "2010", "E.A.Browne", "MEMS fabricated device-", "Single phase Water T_in=23 °C", "17",
         "112 μm", "1mm ²", "930 W/cm²", "Δp = 348 KPa", "h_avg=31.8 W/(cm² K)"},
        {"brunschwiler2006", "Si", "2006", "T.Brunschwiler", "CPU-Si die", "Water/ single-phase", "50000",
         "31-103 μm", "4 cm²", "370 W/cm²", "FL=2.5 L/min Δp = 35 KPa Q_Pump=1.46 W",
         "R_avg = 0.17 Kcm² /W h_av=8.7 W/(cm² K) uniformity < 0.5 °C"},
        {"colgan2007", "Si* Hybrid", "2007", "E. G. Colgan", "Bare die", "Water@22 °C", "Channel pitch: μm",
         "60-100 μm", "4 cm²", "400 W/cm²", "FL=1.25 L/min Δp = 34.5 KPa Q_Pump=0.72 W", "R_avg=0.026 K/W"},
        {"han2015", "Si* Hybrid", "2015", "Yong Han", "GaN device with diamond heat spreader",
         "Single Phase T_in=25 °C", "21 × 11", "100 μm", "0.49cm²", "110W; 260 W/cm²", "Q_Pump=0.05 W",
         "R_avg = 0.09 Kcm² /W"},
        {"whelan2012", "Plastic", "2012", "B.P. Whelan", "Heater block mimic CPU", "Water T_in=15 °C", "49", "1mm",
         "8.24 cm²", "200W", "FL=10 L/min Δp = 37.5 KPa Q_Pump=6.25 W", "R_avg = 0.076 K/W"},
        {"sharma2015", "Plastic", "2015", "C.S. Sharma", "Bare TTV die", "Water Single phase T_in=20 °C",
         "Slot nozzle width", "", "6.26 cm²", "285W; 150W/cm²", "FL=1.2 L/min Δp = 33 KPa Q_Pump=0.66 W",
         "R_avg = 0.2 Kcm² /W"},
        {"bahman2016", "Plastic", "2016", "A. S. Bahman", "IGBT module", "Glycol 50-water 50; T_in=20 °C",
         "40 channels", "2.5-3mm wide Channel", "---", "IGBT:50W Diode: 25W", "Δp = 26 KPa FL=5 L/min Q_Pump=1.27 W",
         "R_avg=0.2 K/W"},
        {"olesen2006", "Plastic", "2006", "Klaus Olesen", "IGBT module", "Ethylene- glycol/water 50%/50%", "---", "---",
         "7.47cm²", "---", "Δp = 0.19 bar FL=12 L/min Q_Pump=3.8 W", "R_avg = 0.97 Kcm² /W"},
        {"natarajan2007", "Ceramic", "2007", "G. Natarajan", "CPU-Si die", "liquid single-phase T_in=20 °C", "1600",
         "126 μm", "1.8 cm^2", "290W/ cm^2", "FL=1.2 L/min Δp = 53 kPa Q_pump=1.06 W",
         "h_avg=5.2 W/(cm^2K) R_avg=0.053 K/W"},
        {"gould2015", "Metal", "2015", "Kyle Gould", "SiC power module base plate",
         "Water-ethylene glycol/ T_in=100 °C", "48", "200 μm", "0.64 cm^2 (16 legs)", "151W",
         "FL=195 ml/min Δp = 34.47 kPa Q_pump=0.11 W", "T_j = 175 °C R_avg=0.28 K cm^2/W"},
        {"overholt2007", "Metal", "2007", "Overholt MR", "Electrical device", "Water", "11x11", "200- 300 μm", "1 cm^2",
         "1.5 kW/ cm^2", "", "h_avg=50 W/(cm^2K) R_avg=0.02 K/W"},
        {"acikalin2014", "Metal", "2014", "Tolga Acikalin", "VLSI device", "Si Liquid/ Single phase T_in=22 °C", "240",
         "300 μm", "1.18 cm^2 Cooler", "40W", "FL=1.18 L/min Δp = 41.4 kPa Q_pump=0.81 W", "R_avg=0.24 K cm^2/W"},
        {"sung2008", "Metal", "2008", "M. K. Sung", "TTV", "HFE 7100 - 40 °C to 20 °C", "5x14", "390 μm", "2 cm^2",
         "16.1- 304.9W/ cm^2", "FL=6.82 to 45.5 mL/min", ""},
        {"skuriat2012", "Metal", "2012", "Skuriat, Robert", "Si diode with AlN substrate", "40 °C water", "36",
         "0.5mm", "12.7 mm^2", "150W 93 W/ cm^2", "Q_pump=6 W", "R_avg=0.2 K/W"},
        {"jorg2017", "Metal", "2017", "J. Jorg", "IGBT- module", "22.5 °C water", "1", "0.6 mm", "25mmx35m m", "125W",
         "FL=300ml/min Q_pump=0.1 W", "h_avg=0.5 W/(cm^2K)"},
        {"jorg2018", "Metal", "2018", "J. Jorg", "MOSFET Device", "22.5 °C water", "1", "0.6 mm", "0.64 cm^2", "51W",
         "FL=30 ml/min Q_pump=3 mW", "h_avg=1.2 W/(cm^2K)"},
        {"robinson2018", "Metal* Hybrid", "2018", "A.J. Robinson", "Heater block", "20 °C water", "100", "30 μm",
         "3.1x4.2 mm^2", "1000 W/ cm^2", "FL=0.5 L/min Δp = 160 kPa Q_pump=1.3 W",
         "h_avg=30 W/(cm^2K) R_avg=0.03 K cm^2/W"},
    };
}

inline csv::Row to_row(const BenchmarkEntry& e) {
    return {e.tag,  e.material,        e.year,      e.authors, e.application, e.coolant,
            e.jets, e.nozzle_diameter, e.chip_area, e.power,   e.hydraulics,  e.thermal};
}

inline void write_benchmark_fixture(std::ostream& out, const std::vector<BenchmarkEntry>& rows) {
    out << csv::join(benchmark_fixture_header()) << '\n';
    for (const auto& e : rows) out << csv::join(to_row(e)) << '\n';
}

inline std::vector<BenchmarkEntry> read_benchmark_fixture(std::istream& in) {
    const auto t = csv::read(in);
    if (t.header != benchmark_fixture_header())
        throw Error(ErrorKind::config, "benchmark fixture header must be '" + csv::join(benchmark_fixture_header()) + "'");
    std::vector<BenchmarkEntry> rows;
    for (const auto& r : t.rows)
        rows.push_back({r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8], r[9], r[10], r[11]});
    return rows;
}

namespace detail {

inline std::string strip_spaces(const std::string& s) {
    std::string out;
    for (char c : s)
        if (c != ' ' && c != '\t') out += c;
    return out;
}

}  // namespace detail

/// Chip area in cm² from texts such as "4 cm²", "1mm ²", "3.1x4.2 mm^2", "25mmx35m m".
inline std::optional<double> parse_area_cm2(const std::string& text) {
    const std::string s = detail::strip_spaces(text);
    static const std::regex product(R"(^([0-9.]+)(?:mm|cm)?x([0-9.]+)(mm|cm))");
    static const std::regex single(R"(^([0-9.]+)(mm|cm))");
    std::smatch m;
    if (std::regex_search(s, m, product)) {
        const double a = std::stod(m[1]) * std::stod(m[2]);
        return m[3] == "mm" ? a / 100.0 : a;
    }
    if (std::regex_search(s, m, single)) {
        const double a = std::stod(m[1]);
        return m[2] == "mm" ? a / 100.0 : a;
    }
    return std::nullopt;
}

/// Pump power in W: reported value, else Δp·flow.
inline std::optional<double> parse_pump_power(const std::string& text) {
    const std::string s = detail::strip_spaces(text);
    static const std::regex pump(R"(Q_[Pp]ump=([0-9.]+)(mW|W))");
    static const std::regex flow(R"(FL=([0-9.]+)(L/min|mL/min|ml/min))");
    static const std::regex dp(R"(Δp=([0-9.]+)(KPa|kPa|bar|Pa))");
    std::smatch m;
    if (std::regex_search(s, m, pump)) return std::stod(m[1]) * (m[2] == "mW" ? 1e-3 : 1.0);
    std::smatch f, p;
    if (std::regex_search(s, f, flow) && std::regex_search(s, p, dp)) {
        const double q = units::mlpm_to_m3s(std::stod(f[1]) * (f[2] == "L/min" ? 1000.0 : 1.0));
        const double pa = std::stod(p[1]) * (p[2] == "bar" ? 1e5 : p[2] == "Pa" ? 1.0 : 1e3);
        return q * pa;
    }
    return std::nullopt;
}

struct ThermalMetric {
    double value;
    bool per_area;  // K·cm²/W already; otherwise K/W
};

inline std::optional<ThermalMetric> parse_thermal(const std::string& text) {
    const std::string s = detail::strip_spaces(text);
    static const std::regex r_avg(R"(R_avg=([0-9.]+)(Kcm²/W|Kcm\^2/W|K/W))");
    static const std::regex h_avg(R"(h_avg=([0-9.]+)W/\(cm(?:²|\^2)K\))");
    std::smatch m;
    if (std::regex_search(s, m, r_avg)) return ThermalMetric{std::stod(m[1]), m[2] != "K/W"};
    if (std::regex_search(s, m, h_avg)) return ThermalMetric{1.0 / std::stod(m[1]), true};
    return std::nullopt;
}

struct BenchmarkPoint {
    std::string tag;
    std::string author;
    std::optional<double> r_star;  // K·cm²/W
    std::optional<double> w_star;  // W/cm²
    std::string status;            // ok, or ';'-joined missing-data codes
};

/// A measured result to place among the literature points.
struct UserResult {
    std::string tag;
    double r_th;      // K/W
    double pump;      // W
    double area_cm2;
};

inline std::vector<BenchmarkPoint> benchmark_points(const std::vector<BenchmarkEntry>& rows,
                                                    const std::optional<UserResult>& user, Warnings* warnings = nullptr) {
    std::vector<BenchmarkPoint> out;
    for (const auto& e : rows) {
        BenchmarkPoint p{e.tag, e.authors, std::nullopt, std::nullopt, ""};
        const auto area = parse_area_cm2(e.chip_area);
        const auto thermal = parse_thermal(e.thermal);
        const auto pump = parse_pump_power(e.hydraulics);
        std::vector<std::string> missing;
        if (!area) missing.push_back("no_chip_area");
        if (!thermal) missing.push_back("no_thermal_metric");
        if (!pump) missing.push_back("no_pump_data");
        if (thermal && (thermal->per_area || area)) p.r_star = thermal->per_area ? thermal->value : thermal->value * *area;
        if (pump && area) p.w_star = *pump / *area;
        p.status = missing.empty() ? "ok" : csv::join(missing);
        if (!missing.empty()) {
            for (auto& c : p.status)
                if (c == ',') c = ';';
            if (warnings) warnings->push_back({"benchmark_incomplete", e.tag + ": " + p.status});
        }
        out.push_back(p);
    }
    if (user) {
        require(user->r_th > 0.0 && user->pump >= 0.0 && user->area_cm2 > 0.0, ErrorKind::invalid_input,
                "benchmark user result needs r_th > 0, pump >= 0, area > 0");
        const auto n = normalize_cm2(user->r_th, user->pump, 0.0, user->area_cm2);
        out.push_back({user->tag, "user", n.r_star, n.w_star, "ok"});
    }
    return out;
}

inline const csv::Row& benchmark_header() {
    static const csv::Row h{"tag", "author", "r_star_Kcm2_W", "w_star_W_cm2", "status"};
    return h;
}

inline void write_benchmark(std::ostream& out, const std::vector<BenchmarkPoint>& pts) {
    out << csv::join(benchmark_header()) << '\n';
    for (const auto& p : pts)
        out << csv::join({p.tag, p.author, p.r_star ? csv::fmt(*p.r_star) : "", p.w_star ? csv::fmt(*p.w_star) : "",
                          p.status})
            << '\n';
}

}  // namespace jetcool
