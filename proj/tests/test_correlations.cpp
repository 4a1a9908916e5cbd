#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "jetcool/correlations.hpp"

using namespace jetcool;

namespace {

// Written out term by term, deliberately not sharing code with the library.
double nu_f_oracle(double a, double h, double re) {
    const double lead = 5.64 * a * a + 0.031 * a - 0.000632;
    const double expo = 0.48 / std::pow(a, 0.16);
    return lead * std::exp(-0.29 * std::log(h)) * std::exp(expo * std::log(re));
}

double f_oracle(double a, double t, double h, double re) {
    const double body = (21.2 * a + 14.5) * std::exp(-0.73 * std::log(re)) * std::exp(-0.26 * std::log(a)) *
                        (2.26 * t + 0.89) * (0.37 * std::exp(0.15 * std::log(h)) + 0.55);
    return (body + 0.8) * a / t;
}

PredictiveInputs design(double re) { return {0.3, 0.3, 0.33, 0.1, re}; }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Correlations, NuFDesignPoint) {
    const auto r = nu_f_predict(design(1024));
    EXPECT_LT(rel(r.value, nu_f_oracle(0.3, 0.33, 1024)), 1e-12);
    EXPECT_LT(rel(r.value, 40.217533063725305), 1e-12);
    EXPECT_NEAR(r.value, 40.216, 2e-3);  // printed to three decimals
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Correlations, NuFAtUnitRe) {
    const auto r = nu_f_predict(design(1.0));
    EXPECT_LT(rel(r.value, 0.7120429065514541), 1e-12);
    EXPECT_TRUE(has_warning(r.warnings, "nu_f_re_range"));
}

TEST(Correlations, NuFDoublingRe) {
    const double ratio = nu_f_predict(design(1024)).value / nu_f_predict(design(512)).value;
    EXPECT_LT(rel(ratio, std::pow(2.0, 0.48 * std::pow(0.3, -0.16))), 1e-12);
    EXPECT_NEAR(ratio, 1.497, 5e-4);
}

TEST(Correlations, NuFWarningsNotClamps) {
    auto in = design(3500);
    in.di_over_L = 0.5;
    in.do_over_L = 0.2;
    in.H_over_L = 0.8;
    const auto r = nu_f_predict(in);
    EXPECT_TRUE(has_warning(r.warnings, "nu_f_re_range"));
    EXPECT_TRUE(has_warning(r.warnings, "nu_f_di_range"));
    EXPECT_TRUE(has_warning(r.warnings, "nu_f_H_range"));
    EXPECT_TRUE(has_warning(r.warnings, "nu_f_do_lt_di"));
    EXPECT_LT(rel(r.value, nu_f_oracle(0.5, 0.8, 3500)), 1e-12);
    in.H_over_L = 0.0;
    EXPECT_THROW(nu_f_predict(in), Error);
}

TEST(Correlations, FrictionDesignPoint) {
    const auto r = friction_predict(design(1024));
    EXPECT_LT(rel(r.f, f_oracle(0.3, 0.1, 0.33, 1024)), 1e-12);
    EXPECT_LT(rel(r.f, 2.923236081638723), 1e-12);
    EXPECT_LT(rel(r.k, 0.9744120272129078), 1e-12);
    EXPECT_NEAR(r.f, 2.923, 5e-4);
    EXPECT_NEAR(r.k, 0.9743, 2e-4);
    EXPECT_NEAR(r.k / r.f, 1.0 / 3.0, 1e-15);
}

TEST(Correlations, FrictionHighReLimit) {
    const auto r = friction_predict(design(1e30));
    EXPECT_NEAR(r.f, 2.4, 1e-9);
    auto zero_t = design(100);
    zero_t.t_over_L = 0.0;
    EXPECT_THROW(friction_predict(zero_t), Error);
}

TEST(Correlations, BiotChain) {
    EXPECT_NEAR(biot_factor(0.05369127516778524), 1.0622314310166208, 1e-15);
    EXPECT_LT(rel(biot_correct(40.0, 0.05369127516778524), 37.656577306997534), 1e-12);
    EXPECT_EQ(biot_correct(40.0, 0.0), 40.0);
    EXPECT_DOUBLE_EQ(biot_factor(1.0), 3.2);
    EXPECT_THROW(biot_factor(-0.1), Error);
}

TEST(Correlations, NuToHtc) {
    EXPECT_NEAR(nu_to_htc(40.0, 0.6e-3, 0.6), 40000.0, 1e-9);
    EXPECT_EQ(nu_to_htc(0.0, 0.6e-3, 0.6), 0.0);
    EXPECT_DOUBLE_EQ(nu_to_htc(40.0, 0.3e-3, 0.6), 2.0 * nu_to_htc(40.0, 0.6e-3, 0.6));
    EXPECT_THROW(nu_to_htc(40.0, 0.0, 0.6), Error);
}

TEST(Correlations, CatalogContents) {
    const auto cat = correlation_catalog::builtin();
    struct Want { const char* label; double c, m; };
    const Want want[] = {{"single_jet", 0.54, 0.56},   {"array_4x4_distributed", 1.63, 0.57},
                         {"array_4x4_common_outlet", 1.34, 0.59}, {"array_8x8", 1.24, 0.67},
                         {"vertical_feed", 0.49, 0.65}, {"lateral_feed", 0.49, 0.64},
                         {"brunschwiler", 0.78, 0.73}, {"hoberg", 0.36, 0.59},
                         {"onstad_1", 0.376, 0.586},   {"onstad_2", 0.436, 0.579},
                         {"onstad_3", 0.602, 0.531},   {"huber_viskanta", 0.285, 0.71}};
    for (const auto& w : want) {
        const auto& e = correlation_catalog::find(cat, w.label);
        EXPECT_EQ(e.c, w.c) << w.label;
        EXPECT_EQ(e.m, w.m) << w.label;
        EXPECT_NO_THROW(e.validate());
    }
    EXPECT_EQ(correlation_catalog::find(cat, "brunschwiler").re_max, 800.0);
    EXPECT_EQ(correlation_catalog::find(cat, "hoberg").re_min, 500.0);
    EXPECT_EQ(correlation_catalog::find(cat, "hoberg").re_max, 10000.0);
    EXPECT_EQ(correlation_catalog::find(cat, "huber_viskanta").re_min, 3400.0);
    EXPECT_EQ(correlation_catalog::find(cat, "huber_viskanta").re_max, 20500.0);
    EXPECT_THROW(correlation_catalog::find(cat, "nope"), Error);
}

TEST(Correlations, EvalCatalog) {
    const auto cat = correlation_catalog::builtin();
    const auto v = eval_catalog(correlation_catalog::find(cat, "array_8x8"), 1000.0);
    EXPECT_LT(rel(v.value, 1.24 * std::exp(0.67 * std::log(1000.0))), 1e-12);
    EXPECT_LT(rel(v.value, 126.88833104281355), 1e-12);
    EXPECT_EQ(eval_catalog(correlation_catalog::find(cat, "brunschwiler"), 1.0).value, 0.78);

    const auto& hv = correlation_catalog::find(cat, "huber_viskanta");
    const auto h = eval_catalog(hv, 3400.0, 7.0, {1.0, 4.0});
    EXPECT_LT(rel(h.value, 63.76520358366958), 1e-12);
    EXPECT_THROW(eval_catalog(hv, 3400.0), Error);
    EXPECT_THROW(eval_catalog(hv, 3400.0, 7.0), Error);
    EXPECT_THROW(eval_catalog(correlation_catalog::find(cat, "onstad_1"), 1000.0), Error);

    const auto out = eval_catalog(correlation_catalog::find(cat, "brunschwiler"), 1200.0);
    EXPECT_TRUE(has_warning(out.warnings, "catalog_re_range"));
}

TEST(Correlations, EntryValidation) {
    PowerLawCorrelation bad{"bad", 0.0, 0.5, {}};
    EXPECT_THROW(bad.validate(), Error);
    PowerLawCorrelation m_out{"m", 1.0, 1.0, {}};
    EXPECT_THROW(m_out.validate(), Error);
    PowerLawCorrelation atypical{"a", 1.0, 0.3, {}};
    EXPECT_TRUE(has_warning(atypical.validate(), "exponent_atypical"));
}

TEST(Correlations, FitPowerLaw) {
    std::vector<std::pair<double, double>> pts;
    for (double re : {100.0, 200.0, 400.0, 800.0}) pts.push_back({re, 0.78 * std::pow(re, 0.73)});
    auto fit = fit_power_law(pts);
    EXPECT_LT(rel(fit.c, 0.78), 1e-10);
    EXPECT_LT(rel(fit.m, 0.73), 1e-10);

    pts.clear();
    for (double re : {50.0, 300.0, 900.0, 2000.0, 3100.0}) pts.push_back({re, 1.63 * std::pow(re, 0.57)});
    fit = fit_power_law(pts);
    EXPECT_LT(rel(fit.c, 1.63), 1e-10);
    EXPECT_LT(rel(fit.m, 0.57), 1e-10);

    pts = {{10, 5}, {20, 5}, {40, 5}};
    fit = fit_power_law(pts);
    EXPECT_NEAR(fit.m, 0.0, 1e-14);
    EXPECT_NEAR(fit.c, 5.0, 1e-12);

    try {
        fit_power_law({{10, 1}, {10, 2}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::underdetermined);
    }
}

TEST(Correlations, CatalogCsvRoundTrip) {
    const auto cat = correlation_catalog::builtin();
    std::stringstream ss;
    correlation_catalog::write(ss, cat);
    const auto back = correlation_catalog::read(ss);
    ASSERT_EQ(back.size(), cat.size());
    for (std::size_t i = 0; i < cat.size(); ++i) {
        EXPECT_EQ(back[i].label, cat[i].label);
        EXPECT_EQ(back[i].c, cat[i].c);
        EXPECT_EQ(back[i].m, cat[i].m);
        EXPECT_EQ(back[i].pr_exponent, cat[i].pr_exponent);
        EXPECT_EQ(back[i].re_max, cat[i].re_max);
        EXPECT_EQ(back[i].basis, cat[i].basis);
        EXPECT_EQ(back[i].form, cat[i].form);
    }
    std::stringstream seven("label,c,m,pr_exponent,re_min,re_max,basis\nx,1.5,0.6,,10,1000,junction\n");
    EXPECT_EQ(correlation_catalog::read(seven).at(0).form, CorrelationForm::power_law);
}

TEST(CorrelationsProperty, MonotoneInRe) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> a(0.05, 0.4), h(0.01, 0.4), t(0.1, 1.0), re(32, 2048);
    for (int i = 0; i < 1000; ++i) {
        PredictiveInputs in{a(rng), 0.0, h(rng), t(rng), re(rng)};
        in.do_over_L = in.di_over_L;
        auto hi = in;
        hi.re *= 1.0 + 1e-3 + 0.5 * std::uniform_real_distribution<double>(0, 1)(rng);
        EXPECT_LT(nu_f_predict(in).value, nu_f_predict(hi).value);
        EXPECT_GT(friction_predict(in).f, friction_predict(hi).f);
    }
}

TEST(CorrelationsProperty, BiotCorrectionNeverRaises) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double bi = u(rng), nu = 100 * u(rng);
        EXPECT_GE(biot_factor(bi), 1.0);
        EXPECT_LE(biot_correct(nu, bi), nu);
    }
}

TEST(CorrelationsProperty, ComponentTrends) {
    // Nu_f is independent of t/L in the full model; f falls with t/L through the 1/(t/d_i) factor
    // faster than the (2.26 t/L + 0.89) term grows, i.e. a decreasing power-law-like trend.
    for (double re : {64.0, 256.0, 1024.0}) {
        double prev = 1e300;
        for (double t = 0.1; t <= 1.0; t += 0.1) {
            auto in = design(re);
            in.t_over_L = t;
            const double f = friction_predict(in).f;
            EXPECT_LT(f, prev);
            prev = f;
        }
    }
    // Nu_f decreases with H/L (negative exponent) and k increases with H/L.
    auto lo = design(512), hi = design(512);
    hi.H_over_L = 0.4;
    lo.H_over_L = 0.05;
    EXPECT_GT(nu_f_predict(lo).value, nu_f_predict(hi).value);
    EXPECT_LT(friction_predict(lo).k, friction_predict(hi).k);
}
