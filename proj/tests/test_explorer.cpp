#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "jetcool/explorer.hpp"

using namespace jetcool;

namespace {

DesignSpace base_space() {
    DesignSpace s;
    s.n_values = {4};
    s.di_over_L = {0.3};
    s.H_over_L = {0.3};
    s.t_over_L = {0.3};
    s.chip_side = 8e-3;
    s.t_c = 0.2e-3;
    s.fluid = catalog::water_10c();
    s.solid = catalog::silicon();
    return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// O(n²) filter: i survives unless some j dominates it, or j < i is an identical point.
std::vector<std::size_t> brute_front(const std::vector<ParetoPoint>& p) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < p.size(); ++i) {
        bool out = false;
        for (std::size_t j = 0; j < p.size() && !out; ++j) {
            if (i == j) continue;
            const bool le = p[j].r_th <= p[i].r_th && p[j].w_p <= p[i].w_p;
            const bool strict = p[j].r_th < p[i].r_th || p[j].w_p < p[i].w_p;
            if ((le && strict) || (!strict && le && j < i)) out = true;
        }
        if (!out) keep.push_back(i);
    }
    std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
        if (p[a].w_p != p[b].w_p) return p[a].w_p < p[b].w_p;
        if (p[a].r_th != p[b].r_th) return p[a].r_th < p[b].r_th;
        return a < b;
    });
    return keep;
}

}  // namespace

TEST(Explorer, DegenerateSweepMatchesEvaluate) {
    const auto s = base_space();
    const double q = units::mlpm_to_m3s(600);
    const auto rows = sweep(s, {ConstraintKind::const_flow, q});
    ASSERT_EQ(rows.size(), 1u);
    const auto direct = evaluate_design(array_from_ratios(8e-3, 4, 0.3, 0.3, 0.3, 0.3, 0.2e-3), s.fluid, s.solid,
                                        {q, 10.0, 0.0, 25.0});
    EXPECT_EQ(rows[0].status, "ok");
    EXPECT_EQ(rows[0].report.r_th, direct.r_th);
    EXPECT_EQ(rows[0].report.dp, direct.dp);
    EXPECT_EQ(rows[0].report.cop, direct.cop);
}

TEST(Explorer, InverseConsistency) {
    const auto s = base_space();
    const double q = units::mlpm_to_m3s(450);
    const auto ref = sweep(s, {ConstraintKind::const_flow, q})[0];
    const auto p = sweep(s, {ConstraintKind::const_pressure, ref.report.dp})[0];
    EXPECT_LT(rel(p.flow_total, q), 1e-9);
    EXPECT_LT(rel(p.report.dp, ref.report.dp), 1e-9);
    const auto w = sweep(s, {ConstraintKind::const_pump, ref.report.w_p})[0];
    EXPECT_LT(rel(w.flow_total, q), 1e-9);
    EXPECT_LT(rel(w.report.w_p, ref.report.w_p), 1e-9);
}

TEST(Explorer, PerAreaTargets) {
    const auto s = base_space();
    const auto a = sweep(s, {ConstraintKind::const_pump, 0.05, true})[0];
    const auto b = sweep(s, {ConstraintKind::const_pump, 0.05 * 0.64})[0];
    EXPECT_LT(rel(a.flow_total, b.flow_total), 1e-12);
}

TEST(Explorer, EnumerationOrderAndFlags) {
    auto s = base_space();
    s.n_values = {2, 4};
    s.di_over_L = {0.2, 0.3};
    s.H_over_L = {0.1, 0.3};
    s.t_over_L = {0.2, 0.5};
    s.do_over_L = {0.3, 1.5};  // second value is not a valid geometry
    const auto rows = sweep(s, {ConstraintKind::const_flow, units::mlpm_to_m3s(300)});
    ASSERT_EQ(rows.size(), 32u);
    std::size_t k = 0;
    for (int n : s.n_values)
        for (double di : s.di_over_L)
            for (double d_o : s.do_over_L)
                for (double h : s.H_over_L)
                    for (double t : s.t_over_L) {
                        const auto& r = rows[k++];
                        EXPECT_EQ(r.n, n);
                        EXPECT_EQ(r.di_over_L, di);
                        EXPECT_EQ(r.do_over_L, d_o);
                        EXPECT_EQ(r.H_over_L, h);
                        EXPECT_EQ(r.t_over_L, t);
                        EXPECT_EQ(r.status, d_o < 1.0 ? "ok" : "invalid");
                    }
}

TEST(Explorer, SweepCsvSchema) {
    auto s = base_space();
    s.n_values = {2, 4, 8};
    const auto rows = sweep(s, {ConstraintKind::const_flow, units::mlpm_to_m3s(300)});
    std::stringstream ss;
    write_sweep(ss, rows);
    const auto t = csv::read(ss);
    EXPECT_EQ(t.header, sweep_header());
    ASSERT_EQ(t.rows.size(), 3u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(csv::to_double(t.rows[i][t.column("r_th_K_W")]), rows[i].report.r_th);
        EXPECT_EQ(csv::to_double(t.rows[i][t.column("dp_Pa")]), rows[i].report.dp);
        EXPECT_EQ(t.rows[i][t.column("status")], "ok");
    }
}

TEST(Explorer, SaturationUnderConstantPump) {
    auto s = base_space();
    s.n_values = {1, 2, 4, 8, 16, 32, 64};
    for (double wp : {0.01, 0.1, 1.0}) {
        const auto rows = sweep(s, {ConstraintKind::const_pump, wp});
        std::vector<double> r;
        for (const auto& row : rows) {
            ASSERT_EQ(row.status, "ok");
            r.push_back(row.report.r_th);
        }
        EXPECT_LT(r[4], r[1]);
        EXPECT_LT(std::abs(r[6] - r[5]), std::abs(r[2] - r[1]));
    }
}

TEST(Explorer, ParetoSmall) {
    EXPECT_EQ(pareto_front({{1, 1}}), (std::vector<std::size_t>{0}));
    const auto f = pareto_front({{1, 2}, {2, 1}, {2, 2}});
    EXPECT_EQ(f, (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(pareto_front({{1, 1}, {1, 1}, {0.5, 3}}), (std::vector<std::size_t>{0, 2}));
    EXPECT_TRUE(pareto_front({}).empty());
}

TEST(ExplorerProperty, ParetoMatchesBruteForce) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> grid(0, 9);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 300;
        std::vector<ParetoPoint> p(n);
        const bool coarse = trial % 2 == 0;  // coarse grids force ties and duplicates
        for (auto& x : p) x = coarse ? ParetoPoint{double(grid(rng)), double(grid(rng))} : ParetoPoint{u(rng), u(rng)};
        const auto front = pareto_front(p);
        EXPECT_EQ(front, brute_front(p));
        for (std::size_t a : front)
            for (std::size_t b : front)
                if (a != b) {
                    const bool dom = p[a].r_th <= p[b].r_th && p[a].w_p <= p[b].w_p &&
                                     (p[a].r_th < p[b].r_th || p[a].w_p < p[b].w_p);
                    EXPECT_FALSE(dom);
                }
    }
}

TEST(Explorer, CopSurface) {
    auto s = base_space();
    s.n_values = {1, 2, 4, 8, 16, 32, 64};
    s.H_over_L = {0.1, 0.3};
    const double q = units::mlpm_to_m3s(300);
    const auto grid = cop_surface(s, q);
    ASSERT_EQ(grid.size(), 14u);
    for (double h : s.H_over_L) {
        std::size_t best = 0;
        double best_cop = -1;
        std::vector<CopNode> line;
        for (const auto& c : grid)
            if (c.H_over_L == h) line.push_back(c);
        for (std::size_t i = 0; i < line.size(); ++i)
            if (line[i].cop > best_cop) {
                best_cop = line[i].cop;
                best = i;
            }
        EXPECT_GT(best, 0u);
        EXPECT_LT(best, line.size() - 1);
        EXPECT_GE(line[best].nozzle_density, 30.0);
        EXPECT_LE(line[best].nozzle_density, 1600.0);
    }
    EXPECT_NEAR(grid[2 * 2 + 1].nozzle_density, 25.0, 1e-12);

    s.n_values = {4};
    s.H_over_L = {0.3};
    const auto one = cop_surface(s, q);
    ASSERT_EQ(one.size(), 1u);
    const auto direct = evaluate_design(array_from_ratios(8e-3, 4, 0.3, 0.3, 0.3, 0.3, 0.2e-3), s.fluid, s.solid,
                                        {q, 10.0, 0.0, 25.0});
    EXPECT_EQ(one[0].cop, direct.cop);
}

TEST(Explorer, HotspotScaleTable) {
    const double base = 5.7e4, q = units::mlpm_to_m3s(9.4);
    const auto a = hotspot_scale(base, q, 64, 24);
    EXPECT_LT(rel(a.htc_star, 109969.91930), 1e-8);
    EXPECT_NEAR(units::m3s_to_mlpm(a.flow_star), 25.066666666666666, 1e-9);
    EXPECT_DOUBLE_EQ(a.dp_ratio, a.m * a.m);
    const auto b = hotspot_scale(base, q, 64, 15);
    EXPECT_LT(rel(b.htc_star, 150672.604), 1e-8);
    EXPECT_NEAR(units::m3s_to_mlpm(b.flow_star), 40.10666666666667, 1e-9);
    const auto id = hotspot_scale(base, q, 10, 10);
    EXPECT_EQ(id.htc_star, base);
    EXPECT_EQ(id.flow_star, q);
    EXPECT_THROW(hotspot_scale(base, q, 4, 5), Error);
    EXPECT_THROW(hotspot_scale(base, q, 4, 0), Error);
}

TEST(ExplorerProperty, HotspotScaleIdentities) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 300; ++i) {
        const int m = 1 + static_cast<int>(rng() % 100);
        const int n = m + static_cast<int>(rng() % 400);
        const auto s = hotspot_scale(3e4, 1e-7, n, m);
        const double ratio = s.flow_star / 1e-7;
        EXPECT_LT(rel(s.htc_star / 3e4, std::pow(ratio, 0.67)), 1e-12);
        EXPECT_LT(rel(s.dp_ratio, ratio * ratio), 1e-12);
    }
}

TEST(Explorer, HotspotModelPoint) {
    const HotspotModel m;
    EXPECT_LT(rel(m.htc(0.3, 15.63), 69640.4613249857), 1e-12);
    EXPECT_NEAR(m.htc(0.3, 15.63), 6.96e4, 50.0);
    EXPECT_LT(rel(m.dp(0.3, 15.63), 10212.312183551325), 1e-12);
    EXPECT_LT(rel(m.flow(0.3, m.dp(0.3, 15.63)), 15.63), 1e-12);
}

TEST(Explorer, FitHtcModelRecovers) {
    const HotspotModel truth;
    std::vector<HotspotSample> samples;
    for (double d : {0.2, 0.3, 0.5, 0.8})
        for (double m : {5.0, 10.0, 20.0, 40.0}) samples.push_back({d, m, truth.htc(d, m), truth.dp(d, m)});
    const auto fit = fit_htc_model(samples, 1e-3);
    EXPECT_LT(rel(fit.c_htc, truth.c_htc), 1e-9);
    EXPECT_NEAR(fit.a, truth.a, 1e-10);
    EXPECT_NEAR(fit.b0, truth.b0, 1e-10);
    EXPECT_NEAR(fit.b1, truth.b1, 1e-10);
    EXPECT_LT(rel(fit.c_dp, truth.c_dp), 1e-9);
    EXPECT_NEAR(fit.e_d, truth.e_d, 1e-10);
    EXPECT_NEAR(fit.e_m, truth.e_m, 1e-10);
    EXPECT_THROW(fit_htc_model({samples[0], samples[1]}, 1e-3), Error);
}

namespace {

void check_plan(const NozzlePlan& plan, double flow_total, const HotspotModel& model = {}) {
    double sum = 0.0;
    for (const auto& c : plan.cells) {
        sum += c.flow;
        if (c.d > 0.0) {
            const double dp = model.dp(c.d / units::mm, units::m3s_to_mlpm(c.flow));
            EXPECT_LT(rel(dp, plan.dp), 1e-6);
        }
    }
    EXPECT_LT(rel(sum, flow_total), 1e-6);
    EXPECT_LT(rel(plan.flow_total, flow_total), 1e-6);
}

}  // namespace

TEST(Explorer, HotspotUniformMap) {
    PowerMap map{4, 4, 1e-3, std::vector<double>(16, 55.0)};
    const double q = units::mlpm_to_m3s(200);
    const auto plan = hotspot_synthesize(map, q, 30.0, catalog::water_10c(), {0.1e-3, 0.9e-3});
    for (const auto& c : plan.cells) {
        EXPECT_EQ(c.d, plan.cells[0].d);
        EXPECT_EQ(c.flow, plan.cells[0].flow);
    }
    check_plan(plan, q);
}

TEST(Explorer, HotspotRandomMapInvariants) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int solved_cells = 0;
    for (int trial = 0; trial < 10; ++trial) {
        PowerMap map{6, 6, 1e-3, {}};
        for (int i = 0; i < 36; ++i) map.density.push_back(u(rng) < 0.15 ? 0.0 : 20 + 130 * u(rng));
        const double q = units::mlpm_to_m3s(40 + 40 * u(rng));
        const auto plan = hotspot_synthesize(map, q, 40.0, catalog::water_10c(), {0.1e-3, 0.9e-3});
        check_plan(plan, q);
        for (const auto& a : plan.cells) {
            if (a.status == "ok") {
                ++solved_cells;
                EXPECT_LT(rel(a.htc, a.htc_required), 1e-8);
            }
            if (a.power_density == 0.0) {
                EXPECT_EQ(a.d, 0.0);
                EXPECT_EQ(a.status, "no_nozzle");
            }
            for (const auto& b : plan.cells) {
                if (a.power_density > 0 && b.power_density > a.power_density) {
                    EXPECT_GE(b.htc, a.htc * (1 - 1e-9));
                }
            }
        }
    }
    EXPECT_GT(solved_cells, 50);
}

TEST(Explorer, HotspotLargeRandomMap) {
    // 25×25 cells at 50–350 W/cm²
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(50.0, 350.0);
    PowerMap map{25, 25, 1e-3, {}};
    for (int i = 0; i < 625; ++i) map.density.push_back(u(rng));
    const double q = units::mlpm_to_m3s(2000);
    const auto plan = hotspot_synthesize(map, q, 30.0, catalog::water_10c(), {0.1e-3, 0.9e-3});
    check_plan(plan, q);
}

TEST(Explorer, HotspotFlagsAndErrors) {
    PowerMap map{2, 2, 1e-3, {10, 10, 10, 5000}};
    const auto plan = hotspot_synthesize(map, units::mlpm_to_m3s(40), 10.0, catalog::water_10c(), {0.2e-3, 0.6e-3});
    EXPECT_FALSE(plan.flagged().empty());
    EXPECT_TRUE(has_warning(plan.warnings, "htc_unreachable"));

    PowerMap wrong{2, 2, 2e-3, {10, 10, 10, 10}};
    try {
        hotspot_synthesize(wrong, 1e-6, 10.0, catalog::water_10c(), {0.2e-3, 0.6e-3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_model);
    }
    PowerMap empty{2, 2, 1e-3, {0, 0, 0, 0}};
    EXPECT_THROW(hotspot_synthesize(empty, 1e-6, 10.0, catalog::water_10c(), {0.2e-3, 0.6e-3}), Error);
    PowerMap negative{1, 2, 1e-3, {1, -1}};
    EXPECT_THROW(hotspot_synthesize(negative, 1e-6, 10.0, catalog::water_10c(), {0.2e-3, 0.6e-3}), Error);
}

TEST(Explorer, NozzlePlanCsv) {
    PowerMap map{2, 3, 1e-3, {10, 0, 30, 40, 50, 60}};
    const auto plan = hotspot_synthesize(map, units::mlpm_to_m3s(60), 20.0, catalog::water_10c(), {0.1e-3, 0.9e-3});
    std::stringstream ss;
    write_nozzle_plan(ss, plan);
    const auto t = csv::read(ss);
    EXPECT_EQ(t.header, nozzle_plan_header());
    ASSERT_EQ(t.rows.size(), 6u);
    EXPECT_EQ(t.rows[1][t.column("d_mm")], "0");
    EXPECT_EQ(csv::to_double(t.rows[5][t.column("htc_W_m2K")]), plan.cells[5].htc);
}
