#pragma once

/**
 * @file cli.hpp
 * @brief Command implementations behind the `jetcool` executable.
 *
 * Every command reads one config, writes its files into the output directory and returns a
 * process exit code: 0 ok, 2 input error, 3 infeasible or non-physical, 4 solver failure.
 * Warnings go to the error stream as `warning: <code>: <message>`.
 */

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jetcool/benchmark.hpp"
#include "jetcool/config.hpp"
#include "jetcool/csv.hpp"
#include "jetcool/error.hpp"
#include "jetcool/explorer.hpp"
#include "jetcool/metrology.hpp"
#include "jetcool/performance.hpp"
#include "jetcool/topo.hpp"

namespace jetcool::cli {

using Json = nlohmann::ordered_json;

enum class Format { csv, json };

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw Error(ErrorKind::config, "--format must be csv or json, got '" + s + "'");
}

struct Options {
    std::string command;
    std::string config;       // empty: none given
    std::string out = "out";  // output directory
    Format format = Format::csv;
    bool selftest = false;    // topo only
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"predict", "explore", "pareto", "cop",      "hotspot",
                                            "topo",    "reduce",  "gci",    "benchmark"};
    return c;
}

class Context {
public:
    Context(const Options& opt, std::ostream& out, std::ostream& err) : opt_(opt), out_(out), err_(err) {}

    const Options& options() const { return opt_; }
    std::ostream& out() { return out_; }
    std::ostream& err() { return err_; }

    config::Config config() const {
        if (opt_.config.empty())
            throw Error(ErrorKind::config, "command '" + opt_.command + "' needs --config <path>");
        return config::Config::load(opt_.config);
    }

    std::filesystem::path write(const std::string& name, const std::string& content) {
        std::filesystem::create_directories(opt_.out);
        const auto p = std::filesystem::path(opt_.out) / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw Error(ErrorKind::config, "cannot write '" + p.string() + "'");
        f << content;
        out_ << "wrote " << p.string() << '\n';
        return p;
    }

    void warn(const Warnings& ws) {
        for (const auto& w : ws) err_ << "warning: " << w.code << ": " << w.message << '\n';
    }

private:
    Options opt_;
    std::ostream& out_;
    std::ostream& err_;
};

/// Numbers stay numbers, blanks become null, anything else a string.
inline Json cell_json(const std::string& s) {
    if (s.empty()) return nullptr;
    try {
        return csv::to_double(s);
    } catch (const Error&) {
        return s;
    }
}

inline Json table_json(const csv::Table& t) {
    Json arr = Json::array();
    for (const auto& r : t.rows) {
        Json o = Json::object();
        for (std::size_t i = 0; i < t.header.size(); ++i) o[t.header[i]] = cell_json(r[i]);
        arr.push_back(std::move(o));
    }
    return arr;
}

/// Writes `<stem>.csv` or `<stem>.json` from CSV text in the command's schema.
inline void emit_table(Context& ctx, const std::string& stem, const std::string& csv_text) {
    if (ctx.options().format == Format::csv) {
        ctx.write(stem + ".csv", csv_text);
        return;
    }
    std::istringstream in(csv_text);
    ctx.write(stem + ".json", table_json(csv::read(in)).dump(2) + "\n");
}

/// Flat report as JSON, or as a `key,value` CSV for scalar members.
inline void emit_report(Context& ctx, const std::string& stem, const Json& report) {
    if (ctx.options().format == Format::json) {
        ctx.write(stem + ".json", report.dump(2) + "\n");
        return;
    }
    std::ostringstream s;
    s << "key,value\n";
    for (const auto& [k, v] : report.items()) {
        if (v.is_structured()) continue;
        std::string val = v.is_string() ? v.get<std::string>() : v.is_null() ? "" : v.dump();
        if (v.is_number_float()) val = csv::fmt(v.get<double>());
        s << csv::join({k, val}) << '\n';
    }
    ctx.write(stem + ".csv", s.str());
}

inline Json warnings_json(const Warnings& ws) {
    Json a = Json::array();
    for (const auto& w : ws) a.push_back({{"code", w.code}, {"message", w.message}});
    return a;
}

inline int cmd_predict(Context& ctx) {
    const auto c = ctx.config();
    const auto fluid = config::fluid_from(c);
    const auto solid = config::solid_from(c);
    const auto array = config::array_from(c);
    const auto op = config::operating_from(c);
    const auto opt = config::report_options_from(c);
    const auto r = evaluate_design(array, fluid, solid, op, opt);
    const auto pb = pressure_decomposition(array.cell, fluid, r.v_nozzle);

    const auto& cell = array.cell;
    Json rep = Json::object();
    rep["n"] = array.n;
    rep["chip_side_mm"] = array.chip_side / units::mm;
    rep["pitch_mm"] = cell.pitch / units::mm;
    rep["d_in_mm"] = cell.d_in / units::mm;
    rep["d_out_mm"] = cell.d_out / units::mm;
    rep["cavity_height_mm"] = cell.cavity_height / units::mm;
    rep["plate_thickness_mm"] = cell.plate_thickness / units::mm;
    rep["chip_thickness_mm"] = cell.chip_thickness / units::mm;
    rep["fluid"] = fluid.name;
    rep["solid"] = solid.name;
    rep["flow_mlpm"] = units::m3s_to_mlpm(op.flow_total);
    rep["inlet_temp_C"] = op.inlet_temp;
    rep["chip_power_W"] = op.chip_power;
    rep["flow_per_nozzle_mlpm"] = units::m3s_to_mlpm(r.flow_per_nozzle);
    rep["v_nozzle_m_s"] = r.v_nozzle;
    rep["re"] = r.re;
    rep["pr"] = r.pr;
    rep["nu_f"] = r.nu_f;
    rep["bi"] = r.bi;
    rep["nu_j"] = r.nu_j;
    rep["htc_W_m2K"] = r.htc;
    rep["r_th_K_W"] = r.r_th;
    rep["r_star_Kcm2_W"] = r.r_star;
    rep["dT_avg_K"] = r.dT_avg;
    rep["f"] = r.f;
    rep["k"] = r.k;
    rep["dp_Pa"] = r.dp;
    rep["wp_W"] = r.w_p;
    rep["cop"] = r.cop;
    rep["pressure_breakdown"] = {{"dp_in_nozzle_Pa", pb.dp_in_nozzle},
                                 {"dp_out_nozzle_Pa", pb.dp_out_nozzle},
                                 {"dp_channel_Pa", pb.dp_channel},
                                 {"dp_jet_residual_Pa", pb.dp_jet_residual}};
    Warnings all = r.warnings;
    all.insert(all.end(), pb.warnings.begin(), pb.warnings.end());
    rep["warnings"] = warnings_json(all);

    for (const auto& [k, v] : rep.items()) {
        if (v.is_structured()) continue;
        ctx.out() << std::left << std::setw(22) << k << ' '
                  << (v.is_number_float() ? csv::fmt(v.get<double>()) : v.is_string() ? v.get<std::string>() : v.dump())
                  << '\n';
    }
    emit_report(ctx, "report", rep);
    ctx.warn(all);
    return 0;
}

/// Non-zero when no design of the sweep could be evaluated.
inline int sweep_exit(const std::vector<SweepRow>& rows) {
    bool any_infeasible = false;
    for (const auto& r : rows) {
        if (r.status == "ok") return 0;
        any_infeasible = any_infeasible || r.status == "infeasible";
    }
    return any_infeasible ? 3 : 2;
}

inline void warn_rows(Context& ctx, const std::vector<SweepRow>& rows) {
    for (const auto& r : rows)
        if (r.status != "ok") ctx.err() << "warning: " << r.status << ": n=" << r.n << ": " << r.message << '\n';
}

inline int cmd_explore(Context& ctx) {
    const auto c = ctx.config();
    const auto rows = sweep(config::design_space_from(c), config::constraint_from(c));
    std::ostringstream s;
    write_sweep(s, rows);
    emit_table(ctx, "sweep", s.str());
    warn_rows(ctx, rows);
    ctx.out() << rows.size() << " designs\n";
    return sweep_exit(rows);
}

/// Sweep rows on the (r_th, w_p) front, in order of rising pump power.
inline std::string pareto_rows(const csv::Table& t) {
    if (t.header != sweep_header())
        throw Error(ErrorKind::config, "pareto input must carry the sweep header '" + csv::join(sweep_header()) + "'");
    const auto st = t.column("status"), rc = t.column("r_th_K_W"), wc = t.column("wp_W");
    std::vector<std::size_t> ok;
    std::vector<ParetoPoint> pts;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i][st] != "ok") continue;
        ok.push_back(i);
        pts.push_back({csv::to_double(t.rows[i][rc], "r_th_K_W"), csv::to_double(t.rows[i][wc], "wp_W")});
    }
    std::ostringstream s;
    s << csv::join(t.header) << '\n';
    for (std::size_t k : pareto_front(pts)) s << csv::join(t.rows[ok[k]]) << '\n';
    return s.str();
}

inline int cmd_pareto(Context& ctx) {
    const auto c = ctx.config();
    csv::Table t;
    if (c.has("pareto", "sweep")) {
        t = csv::read_file(c.path("pareto", "sweep"));
    } else {
        const auto rows = sweep(config::design_space_from(c), config::constraint_from(c));
        warn_rows(ctx, rows);
        std::stringstream s;
        write_sweep(s, rows);
        t = csv::read(s);
    }
    const auto front = pareto_rows(t);
    emit_table(ctx, "pareto", front);
    ctx.out() << std::count(front.begin(), front.end(), '\n') - 1 << " non-dominated designs\n";
    return 0;
}

inline int cmd_cop(Context& ctx) {
    const auto c = ctx.config();
    const auto nodes = cop_surface(config::design_space_from(c), units::mlpm_to_m3s(c.number("cop", "flow_mlpm")));
    std::ostringstream s;
    s << "n,nozzle_density_cm2,H_over_L,H_mm,cop,status\n";
    for (const auto& n : nodes)
        s << csv::join({std::to_string(n.n), csv::fmt(n.nozzle_density), csv::fmt(n.H_over_L),
                        csv::fmt(n.cavity_height / units::mm), n.status == "ok" ? csv::fmt(n.cop) : "", n.status})
          << '\n';
    emit_table(ctx, "cop", s.str());
    ctx.out() << nodes.size() << " grid nodes\n";
    return 0;
}

inline int cmd_hotspot(Context& ctx) {
    const auto c = ctx.config();
    const auto mode = c.get_or("hotspot", "mode", "synthesize");
    if (mode == "scale") {
        const auto s = hotspot_scale(c.number("hotspot", "base_htc_W_m2K"), c.number("hotspot", "base_flow_mlpm"),
                                     c.integer("hotspot", "n_sq"), c.integer("hotspot", "m_nozzles"));
        Json rep = {{"m", s.m},
                    {"htc_star_W_m2K", s.htc_star},
                    {"flow_star_mlpm", s.flow_star},
                    {"dp_ratio", s.dp_ratio}};
        ctx.out() << "htc* = " << csv::fmt(s.htc_star) << " W/m2K, flow* = " << csv::fmt(s.flow_star)
                  << " mL/min per nozzle\n";
        emit_report(ctx, "hotspot", rep);
        return 0;
    }
    if (mode != "synthesize") throw Error(ErrorKind::config, "[hotspot] mode must be scale or synthesize");
    const auto map = config::power_map_from(c);
    const auto plan = hotspot_synthesize(map, units::mlpm_to_m3s(c.number("hotspot", "flow_total_mlpm")),
                                         c.number("hotspot", "dT_target_K"), config::fluid_from(c),
                                         {c.number("hotspot", "d_min_mm") * units::mm,
                                          c.number("hotspot", "d_max_mm") * units::mm},
                                         config::hotspot_model_from(c));
    std::ostringstream s;
    write_nozzle_plan(s, plan);
    emit_table(ctx, "nozzle_plan", s.str());
    Json flagged = Json::array();
    for (std::size_t i : plan.flagged())
        flagged.push_back({{"row", plan.cells[i].row},
                           {"col", plan.cells[i].col},
                           {"htc_W_m2K", plan.cells[i].htc},
                           {"htc_required_W_m2K", plan.cells[i].htc_required}});
    Json sum = {{"dp", plan.dp},
                {"flow_total_mlpm", units::m3s_to_mlpm(plan.flow_total)},
                {"cells", plan.cells.size()},
                {"unreachable_cells", flagged},
                {"warnings", warnings_json(plan.warnings)}};
    ctx.write("hotspot_summary.json", sum.dump(2) + "\n");
    ctx.warn(plan.warnings);
    if (!flagged.empty()) {
        ctx.err() << "error: infeasible: " << flagged.size() << " cell(s) cannot reach the required htc\n";
        return 3;
    }
    return 0;
}

inline int cmd_topo_selftest(Context& ctx) {
    const auto chk = topo::poiseuille_selftest();
    Json rep = {{"ny", chk.ny},
                {"error", chk.error},
                {"observed_order", chk.observed_order},
                {"max_divergence", chk.max_divergence}};
    bool ok = chk.max_divergence <= 1e-8;
    for (double p : chk.observed_order) ok = ok && std::abs(p - 2.0) <= 0.3;
    rep["pass"] = ok;
    for (std::size_t k = 0; k < chk.ny.size(); ++k)
        ctx.out() << "ny=" << chk.ny[k] << " error=" << csv::fmt(chk.error[k])
                  << (k ? " order=" + csv::fmt(chk.observed_order[k - 1]) : "") << '\n';
    ctx.out() << "selftest " << (ok ? "PASS" : "FAIL") << '\n';
    ctx.write("selftest.json", rep.dump(2) + "\n");
    return ok ? 0 : 4;
}

inline int cmd_topo(Context& ctx) {
    if (ctx.options().selftest) return cmd_topo_selftest(ctx);
    const auto c = ctx.config();
    const auto pb = config::topo_problem_from(c);
    const auto res = topo::optimize(pb);

    // Fields at the final penalization stage.
    auto last = pb;
    if (!pb.q_continuation.empty()) last.q = pb.q_continuation.back();
    const auto sol = topo::solve_flow(last, res.eps);

    std::ostringstream d, pgm, h, f;
    topo::write_density_csv(d, res.eps, pb.grid.nx, pb.grid.ny);
    topo::write_density_pgm(pgm, res.eps, pb.grid.nx, pb.grid.ny);
    topo::write_history_csv(h, res.history);
    topo::write_fields_csv(f, pb.grid, sol);
    ctx.write("density.csv", d.str());
    ctx.write("density.pgm", pgm.str());
    emit_table(ctx, "history", h.str());
    ctx.write("fields.csv", f.str());

    auto fractions = [](const topo::Objective& o) {
        std::vector<double> v;
        for (double q : o.outlet_flux) v.push_back(o.q_in > 0.0 ? q / o.q_in : 0.0);
        return v;
    };
    const double s0 = topo::flux_spread(res.initial.outlet_flux, res.initial.q_in);
    const double s1 = topo::flux_spread(res.final.outlet_flux, res.final.q_in);
    Json sum = {{"iterations", res.iterations},
                {"stalled", res.stalled},
                {"J_initial", res.initial.J},
                {"J_final", res.final.J},
                {"volume", topo::mean_density(res.eps)},
                {"outlet_fraction_initial", fractions(res.initial)},
                {"outlet_fraction_final", fractions(res.final)},
                {"spread_initial", s0},
                {"spread_final", s1},
                {"spread_ratio", s0 > 0.0 ? Json(s1 / s0) : Json(nullptr)},
                {"max_divergence", sol.divergence},
                {"warnings", warnings_json(res.warnings)}};
    ctx.write("summary.json", sum.dump(2) + "\n");
    ctx.out() << "J " << csv::fmt(res.initial.J) << " -> " << csv::fmt(res.final.J) << " in " << res.iterations
              << " iterations\n";
    ctx.warn(res.warnings);
    return 0;
}

inline int cmd_reduce(Context& ctx) {
    const auto c = ctx.config();
    const auto path = c.path("reduce", "dataset");
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open dataset '" + path + "'");
    const auto ds = read_sensor_dataset(in);
    const auto dT = sensor_to_dT(ds.map);
    auto num = [&](const std::string& key) {
        if (c.has("reduce", key)) return c.number("reduce", key);
        if (ds.params.count(key)) return ds.number(key);
        throw Error(ErrorKind::config, "missing '" + key + "' in section [reduce] and in the dataset header");
    };
    const auto r = reduce(dT, num("power_W"), num("ambient_temp_C"), num("inlet_temp_C"), num("r_loss_K_W"),
                          config::chip_stack_from(c, ds));
    Json rep = Json::object();
    rep["sensors"] = dT.size();
    rep["dT_avg_K"] = r.dT_avg;
    rep["dT_max_K"] = *std::max_element(dT.begin(), dT.end());
    rep["dT_min_K"] = *std::min_element(dT.begin(), dT.end());
    rep["t_chip_C"] = r.t_chip;
    rep["r_th_K_W"] = r.r_th;
    rep["q_loss_W"] = r.q_loss;
    rep["q_net_W"] = r.q_net;
    rep["t_s_C"] = r.t_s;
    rep["htc_W_m2K"] = r.htc;
    for (const std::string key : {"r_th", "htc"})
        if (c.has("uncertainty", key)) rep[key + "_rel_uncertainty"] = propagate(c.list("uncertainty", key));
    emit_report(ctx, "reduction", rep);
    ctx.out() << "R_th = " << csv::fmt(r.r_th) << " K/W, htc = " << csv::fmt(r.htc) << " W/m2K\n";
    return 0;
}

inline int cmd_gci(Context& ctx) {
    const auto c = ctx.config();
    const auto f = c.list("gci", "f");
    require(f.size() == 3, ErrorKind::config, "[gci] f must list three values, finest grid first");
    const auto g = gci(f[0], f[1], f[2], c.number("gci", "r"), c.number_or("gci", "fs", 1.25),
                       c.number_or("gci", "range_tol", 0.05));
    Json rep = {{"p", g.p},
                {"gci12", g.gci12},
                {"gci23", g.gci23},
                {"asymptotic_ratio", g.asymptotic_ratio},
                {"in_asymptotic_range", g.in_asymptotic_range}};
    emit_report(ctx, "gci", rep);
    ctx.out() << "p = " << csv::fmt(g.p) << ", GCI23 = " << csv::fmt(g.gci23) << '\n';
    return 0;
}

/// Config is optional: without one the built-in fixture is normalized alone.
inline int cmd_benchmark(Context& ctx) {
    std::vector<BenchmarkEntry> rows = benchmark_table1();
    std::optional<UserResult> user;
    if (!ctx.options().config.empty()) {
        const auto c = ctx.config();
        if (c.has("benchmark", "fixture")) {
            const auto path = c.path("benchmark", "fixture");
            std::ifstream in(path);
            if (!in) throw Error(ErrorKind::config, "cannot open fixture '" + path + "'");
            rows = read_benchmark_fixture(in);
        }
        if (c.has("benchmark", "user_r_th_K_W"))
            user = UserResult{c.get_or("benchmark", "user_tag", "user"), c.number("benchmark", "user_r_th_K_W"),
                              c.number("benchmark", "user_pump_W"), c.number("benchmark", "user_area_cm2")};
    }
    Warnings w;
    const auto pts = benchmark_points(rows, user, &w);
    std::ostringstream s;
    write_benchmark(s, pts);
    emit_table(ctx, "benchmark", s.str());
    ctx.warn(w);
    return 0;
}

/// Dispatches and maps errors to exit codes.
inline int run(const Options& opt, std::ostream& out, std::ostream& err) {
    Context ctx(opt, out, err);
    try {
        if (opt.command == "predict") return cmd_predict(ctx);
        if (opt.command == "explore") return cmd_explore(ctx);
        if (opt.command == "pareto") return cmd_pareto(ctx);
        if (opt.command == "cop") return cmd_cop(ctx);
        if (opt.command == "hotspot") return cmd_hotspot(ctx);
        if (opt.command == "topo") return cmd_topo(ctx);
        if (opt.command == "reduce") return cmd_reduce(ctx);
        if (opt.command == "gci") return cmd_gci(ctx);
        if (opt.command == "benchmark") return cmd_benchmark(ctx);
        throw Error(ErrorKind::config, "unknown command '" + opt.command + "'");
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace jetcool::cli
