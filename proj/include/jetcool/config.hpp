#pragma once

/**
 * @file config.hpp
 * @brief Sectioned key-value run configuration and its mapping onto the library inputs.
 *
 * Boundary units: mm, mL/min, °C, W, Pa. Values are converted to SI here and nowhere else.
 * Lists are whitespace or comma separated; `lo:hi:count` expands to an even spacing.
 */

#include <boost/program_options/options_description.hpp>
#include <boost/program_options/parsers.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jetcool/benchmark.hpp"
#include "jetcool/csv.hpp"
#include "jetcool/error.hpp"
#include "jetcool/explorer.hpp"
#include "jetcool/geometry.hpp"
#include "jetcool/metrology.hpp"
#include "jetcool/performance.hpp"
#include "jetcool/props.hpp"
#include "jetcool/topo.hpp"
#include "jetcool/units.hpp"

namespace jetcool::config {

class Config {
public:
    using Section = std::map<std::string, std::vector<std::string>>;

    static Config parse(std::istream& in, std::filesystem::path base_dir = ".") {
        namespace po = boost::program_options;
        Config c;
        c.base_ = std::move(base_dir);
        try {
            const auto parsed = po::parse_config_file<char>(in, po::options_description{}, true);
            for (const auto& opt : parsed.options) {
                const auto dot = opt.string_key.find('.');
                const std::string sec = dot == std::string::npos ? "" : opt.string_key.substr(0, dot);
                const std::string key = dot == std::string::npos ? opt.string_key : opt.string_key.substr(dot + 1);
                auto& vals = c.sections_[sec][key];
                for (const auto& v : opt.value) vals.push_back(trim(v));
            }
        } catch (const po::error& e) {
            throw Error(ErrorKind::config, std::string("config syntax: ") + e.what());
        }
        return c;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::config, "cannot open config '" + path + "'");
        return parse(in, std::filesystem::path(path).parent_path());
    }

    bool has(const std::string& section) const { return sections_.count(section) > 0; }

    const Section& section(const std::string& name) const {
        auto it = sections_.find(name);
        if (it == sections_.end()) throw Error(ErrorKind::config, "missing section [" + name + "]");
        return it->second;
    }

    bool has(const std::string& sec, const std::string& key) const {
        return has(sec) && section(sec).count(key) > 0;
    }

    std::string get(const std::string& sec, const std::string& key) const {
        const auto& s = section(sec);
        auto it = s.find(key);
        if (it == s.end()) throw Error(ErrorKind::config, "missing key '" + key + "' in section [" + sec + "]");
        if (it->second.size() != 1)
            throw Error(ErrorKind::config, "key '" + key + "' in section [" + sec + "] is given more than once");
        return it->second.front();
    }

    std::string get_or(const std::string& sec, const std::string& key, const std::string& fallback) const {
        return has(sec, key) ? get(sec, key) : fallback;
    }

    std::vector<std::string> all(const std::string& sec, const std::string& key) const {
        if (!has(sec, key)) return {};
        return section(sec).at(key);
    }

    double number(const std::string& sec, const std::string& key) const {
        return csv::to_double(get(sec, key), "[" + sec + "] " + key);
    }

    double number_or(const std::string& sec, const std::string& key, double fallback) const {
        return has(sec, key) ? number(sec, key) : fallback;
    }

    std::optional<double> maybe(const std::string& sec, const std::string& key) const {
        if (!has(sec, key)) return std::nullopt;
        return number(sec, key);
    }

    int integer(const std::string& sec, const std::string& key) const {
        const double v = number(sec, key);
        if (v != std::floor(v) || std::abs(v) > 1e9)
            throw Error(ErrorKind::config, "[" + sec + "] " + key + " must be an integer");
        return static_cast<int>(v);
    }

    int integer_or(const std::string& sec, const std::string& key, int fallback) const {
        return has(sec, key) ? integer(sec, key) : fallback;
    }

    bool flag_or(const std::string& sec, const std::string& key, bool fallback) const {
        if (!has(sec, key)) return fallback;
        const auto v = get(sec, key);
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw Error(ErrorKind::config, "[" + sec + "] " + key + " must be true or false");
    }

    std::vector<double> list(const std::string& sec, const std::string& key) const {
        return parse_list(get(sec, key), "[" + sec + "] " + key);
    }

    std::vector<double> list_or(const std::string& sec, const std::string& key, std::vector<double> fallback) const {
        return has(sec, key) ? list(sec, key) : fallback;
    }

    /// File references are relative to the config file's directory.
    std::string path(const std::string& sec, const std::string& key) const {
        std::filesystem::path p(get(sec, key));
        if (p.is_relative()) p = base_ / p;
        return p.string();
    }

    static std::vector<double> parse_list(const std::string& text, const std::string& what) {
        std::string s = text;
        for (auto& c : s)
            if (c == ',') c = ' ';
        std::istringstream in(s);
        std::vector<double> out;
        std::string tok;
        while (in >> tok) {
            const auto c1 = tok.find(':');
            if (c1 == std::string::npos) {
                out.push_back(csv::to_double(tok, what));
                continue;
            }
            const auto c2 = tok.find(':', c1 + 1);
            if (c2 == std::string::npos) throw Error(ErrorKind::config, what + ": range must be lo:hi:count");
            const double cnt = csv::to_double(tok.substr(c2 + 1), what);
            if (cnt < 1 || cnt != std::floor(cnt)) throw Error(ErrorKind::config, what + ": range count must be >= 1");
            const auto v = linspace(csv::to_double(tok.substr(0, c1), what),
                                    csv::to_double(tok.substr(c1 + 1, c2 - c1 - 1), what), static_cast<int>(cnt));
            out.insert(out.end(), v.begin(), v.end());
        }
        if (out.empty()) throw Error(ErrorKind::config, what + " is empty");
        return out;
    }

private:
    std::map<std::string, Section> sections_;
    std::filesystem::path base_;
};

inline FluidProps fluid_from(const Config& c) {
    const auto& s = c.section("fluid");
    if (s.count("name") && !s.count("density_kg_m3")) {
        const auto name = c.get("fluid", "name");
        auto f = catalog::find_fluid(name);
        if (!f) throw Error(ErrorKind::config, "unknown fluid '" + name + "' in section [fluid]");
        return *f;
    }
    FluidProps f{c.get_or("fluid", "name", "custom"), c.number("fluid", "density_kg_m3"),
                 c.number("fluid", "viscosity_kg_ms"), c.number("fluid", "cp_J_kgK"), c.number("fluid", "k_W_mK"),
                 c.number_or("fluid", "ref_temp_C", 25.0)};
    f.validate();
    return f;
}

/// Silicon unless a [solid] section says otherwise.
inline SolidProps solid_from(const Config& c) {
    if (!c.has("solid")) return catalog::silicon();
    if (c.has("solid", "k_W_mK")) {
        SolidProps s{c.get_or("solid", "name", "custom"), c.number("solid", "k_W_mK")};
        s.validate();
        return s;
    }
    const auto name = c.get("solid", "name");
    auto s = catalog::find_solid(name);
    if (!s) throw Error(ErrorKind::config, "unknown solid '" + name + "' in section [solid]");
    return *s;
}

inline CoolerArray array_from(const Config& c) {
    const double di = c.number("geometry", "di_over_L");
    return array_from_ratios(c.number("geometry", "chip_side_mm") * units::mm, c.integer("geometry", "n"), di,
                             c.number_or("geometry", "do_over_L", di), c.number("geometry", "H_over_L"),
                             c.number("geometry", "t_over_L"), c.number("geometry", "chip_thickness_mm") * units::mm,
                             c.number_or("geometry", "heated_fraction", 0.75));
}

inline OperatingPoint operating_from(const Config& c) {
    return {units::mlpm_to_m3s(c.number("operating", "flow_mlpm")), c.number_or("operating", "inlet_temp_C", 10.0),
            c.number_or("operating", "chip_power_W", 0.0), c.number_or("operating", "ambient_temp_C", 25.0)};
}

inline ReportOptions report_options_from(const Config& c) {
    ReportOptions o;
    o.dT_max_allow = c.number_or("operating", "dT_max_allow_K", 60.0);
    o.prandtl_scaling = c.flag_or("operating", "prandtl_scaling", false);
    return o;
}

inline DesignSpace design_space_from(const Config& c) {
    DesignSpace s;
    for (double n : c.list("sweep", "n")) {
        if (n != std::floor(n) || n < 1) throw Error(ErrorKind::config, "[sweep] n values must be positive integers");
        s.n_values.push_back(static_cast<int>(n));
    }
    s.di_over_L = c.list("sweep", "di_over_L");
    s.do_over_L = c.list_or("sweep", "do_over_L", {});
    s.H_over_L = c.list("sweep", "H_over_L");
    s.t_over_L = c.list("sweep", "t_over_L");
    s.chip_side = c.number("geometry", "chip_side_mm") * units::mm;
    s.t_c = c.number("geometry", "chip_thickness_mm") * units::mm;
    s.heated_fraction = c.number_or("geometry", "heated_fraction", 0.75);
    s.fluid = fluid_from(c);
    s.solid = solid_from(c);
    s.inlet_temp = c.number_or("operating", "inlet_temp_C", 10.0);
    s.dT_max_allow = c.number_or("operating", "dT_max_allow_K", 60.0);
    return s;
}

/// Constraint value in mL/min, Pa or W by mode.
inline ConstraintMode constraint_from(const Config& c) {
    const auto kind = parse_constraint(c.get("constraint", "mode"));
    double v = c.number("constraint", "value");
    if (kind == ConstraintKind::const_flow) v = units::mlpm_to_m3s(v);
    return {kind, v, c.flag_or("constraint", "per_cm2", false)};
}

inline topo::TopoProblem topo_problem_from(const Config& c) {
    topo::TopoProblem pb;
    pb.grid.nx = c.integer("grid", "nx");
    pb.grid.ny = c.integer("grid", "ny");
    require(pb.grid.nx >= 1 && pb.grid.ny >= 1, ErrorKind::config, "[grid] nx and ny must be >= 1");
    // Spacing from dx_mm/dy_mm or from the domain extent lx_mm/ly_mm.
    pb.grid.dx = (c.has("grid", "lx_mm") ? c.number("grid", "lx_mm") / pb.grid.nx : c.number("grid", "dx_mm")) * units::mm;
    pb.grid.dy = c.has("grid", "ly_mm")   ? c.number("grid", "ly_mm") / pb.grid.ny * units::mm
                 : c.has("grid", "dy_mm") ? c.number("grid", "dy_mm") * units::mm
                                          : pb.grid.dx;
    if (c.has("fluid")) pb.fluid = fluid_from(c);
    c.section("boundary");
    for (const auto& s : c.all("boundary", "segment")) pb.grid.segments.push_back(topo::parse_segment(s));
    if (c.has("optimize")) {
        pb.beta = c.number_or("optimize", "beta", pb.beta);
        pb.volume_fraction = c.number_or("optimize", "volume_fraction", pb.volume_fraction);
        pb.q = c.number_or("optimize", "q", pb.q);
        pb.q_continuation = c.list_or("optimize", "q_continuation", {});
        pb.max_iters = c.integer_or("optimize", "max_iters", pb.max_iters);
        pb.eps0 = c.maybe("optimize", "eps0");
        pb.move_limit = c.number_or("optimize", "move_limit", pb.move_limit);
        pb.alpha_max = c.maybe("optimize", "alpha_max");
        pb.alpha_min = c.maybe("optimize", "alpha_min");
        pb.alpha_length = c.number_or("optimize", "alpha_length_mm", 0.0) * units::mm;
        const auto conv = c.get_or("optimize", "alpha_convention", "fluid");
        if (conv == "fluid") {
            pb.convention = topo::AlphaConvention::fluid;
        } else if (conv == "literal") {
            pb.convention = topo::AlphaConvention::literal;
        } else {
            throw Error(ErrorKind::config, "[optimize] alpha_convention must be fluid or literal");
        }
        pb.body_fx = c.number_or("optimize", "body_fx_N_m3", 0.0);
        pb.body_fy = c.number_or("optimize", "body_fy_N_m3", 0.0);
    }
    pb.validate();
    return pb;
}

inline ChipStack chip_stack_from(const Config& c, const SensorDataset& ds) {
    auto num = [&](const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (c.has("reduce", key)) return c.number("reduce", key);
        if (ds.params.count(key)) return ds.number(key);
        if (fallback) return *fallback;
        throw Error(ErrorKind::config, "missing '" + key + "' in section [reduce] and in the dataset header");
    };
    return {num("chip_thickness_mm") * units::mm, num("k_s_W_mK", 149.0), num("heated_area_mm2") * units::mm * units::mm};
}

inline HotspotModel hotspot_model_from(const Config& c) {
    HotspotModel m;
    if (!c.has("model")) return m;
    m.c_htc = c.number_or("model", "c_htc", m.c_htc);
    m.a = c.number_or("model", "a", m.a);
    m.b0 = c.number_or("model", "b0", m.b0);
    m.b1 = c.number_or("model", "b1", m.b1);
    m.c_dp = c.number_or("model", "c_dp", m.c_dp);
    m.e_d = c.number_or("model", "e_d", m.e_d);
    m.e_m = c.number_or("model", "e_m", m.e_m);
    m.pitch = c.number_or("model", "pitch_mm", m.pitch / units::mm) * units::mm;
    return m;
}

/// Power map from `map = file` (plain comma-separated matrix of W/cm², row 0 first) or a uniform
/// `uniform_W_cm2` over `rows` × `cols`.
inline PowerMap power_map_from(const Config& c) {
    PowerMap m{0, 0, c.number("hotspot", "pitch_mm") * units::mm, {}};
    if (c.has("hotspot", "map")) {
        std::ifstream in(c.path("hotspot", "map"));
        if (!in) throw Error(ErrorKind::config, "cannot open power map '" + c.get("hotspot", "map") + "'");
        std::vector<std::vector<double>> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
            std::vector<double> r;
            for (const auto& f : csv::split_line(line)) r.push_back(csv::to_double(f, "power map value"));
            if (!rows.empty() && r.size() != rows.front().size())
                throw Error(ErrorKind::config, "power map rows differ in length");
            rows.push_back(std::move(r));
        }
        if (rows.empty()) throw Error(ErrorKind::config, "power map is empty");
        m.rows = static_cast<int>(rows.size());
        m.cols = static_cast<int>(rows.front().size());
        for (const auto& r : rows) m.density.insert(m.density.end(), r.begin(), r.end());
    } else {
        m.rows = c.integer("hotspot", "rows");
        m.cols = c.integer("hotspot", "cols");
        require(m.rows >= 1 && m.cols >= 1, ErrorKind::config, "[hotspot] rows and cols must be >= 1");
        m.density.assign(static_cast<std::size_t>(m.rows * m.cols), c.number("hotspot", "uniform_W_cm2"));
    }
    m.validate();
    return m;
}

}  // namespace jetcool::config
