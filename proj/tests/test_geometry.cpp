#include <gtest/gtest.h>

#include <random>

#include "jetcool/geometry.hpp"

using namespace jetcool;

TEST(Geometry, ArrayFromRatios) {
    const auto a = array_from_ratios(8e-3, 4, 0.3, 0.3, 0.3, 0.3, 0.2e-3);
    EXPECT_DOUBLE_EQ(a.cell.pitch, 2e-3);
    EXPECT_NEAR(a.cell.d_in, 0.6e-3, 1e-18);
    EXPECT_EQ(a.nozzle_count(), 16);

    const auto single = array_from_ratios(8e-3, 1, 0.3, 0.3, 0.3, 0.3, 0.2e-3);
    EXPECT_EQ(single.cell.pitch, 8e-3);

    const auto fine = array_from_ratios(8e-3, 8, 0.3, 0.3, 0.3, 0.3, 0.2e-3);
    EXPECT_NEAR(fine.cell.d_in, 0.3e-3, 1e-18);
    EXPECT_NEAR(fine.nozzle_density(), 100.0, 1e-12);
}

TEST(Geometry, ArrayFromRatiosRejects) {
    EXPECT_THROW(array_from_ratios(8e-3, 4, 1.0, 0.3, 0.3, 0.3, 0.2e-3), Error);
    EXPECT_THROW(array_from_ratios(8e-3, 4, 0.3, 1.2, 0.3, 0.3, 0.2e-3), Error);
    EXPECT_THROW(array_from_ratios(8e-3, 0, 0.3, 0.3, 0.3, 0.3, 0.2e-3), Error);
    try {
        array_from_ratios(8e-3, 4, 1.0, 0.3, 0.3, 0.3, 0.2e-3);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_geometry);
    }
    // H/L and t/L may exceed one.
    EXPECT_NO_THROW(array_from_ratios(8e-3, 4, 0.3, 0.3, 2.0, 1.5, 0.2e-3));
}

TEST(Geometry, Normalize) {
    EXPECT_EQ(normalize(0.25, 1.46, 1e-6, 0.64e-4).r_star, 0.16);
    EXPECT_EQ(normalize_cm2(0.25, 1.46, 1e-6, 0.64).r_star, 0.16);
    EXPECT_EQ(normalize_cm2(0.0, 1.46, 0.0, 4.0).w_star, 0.365);
    EXPECT_EQ(normalize_cm2(0.16, 0.4, 0.0, 0.64).w_star, 0.625);
    EXPECT_DOUBLE_EQ(normalize(0.37, 0, 0, 1 * units::cm2).r_star, 0.37);
    EXPECT_THROW(normalize(1, 1, 1, 0.0), Error);
    EXPECT_THROW(normalize_cm2(1, 1, 1, -1.0), Error);
}

TEST(Geometry, PerNozzleFlow) {
    EXPECT_DOUBLE_EQ(units::m3s_to_mlpm(per_nozzle_flow(units::mlpm_to_m3s(600), 4)), 37.5);
    EXPECT_NEAR(units::m3s_to_mlpm(per_nozzle_flow(units::mlpm_to_m3s(1000), 8)), 15.625, 1e-12);
    EXPECT_EQ(per_nozzle_flow(0.0, 3), 0.0);
    EXPECT_THROW(per_nozzle_flow(1.0, 0), Error);
}

TEST(Geometry, ExtrapolatePower) {
    // 70 * 5.3 / 0.272
    EXPECT_NEAR(extrapolate_power(0.272, 5.3, 70.0), 1363.970588235294, 1e-9);
    EXPECT_EQ(extrapolate_power(0.272, 5.3, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(extrapolate_power(0.3, 10.6, 70.0), 2.0 * extrapolate_power(0.3, 5.3, 70.0));
    EXPECT_THROW(extrapolate_power(0.0, 5.3, 70.0), Error);
}

TEST(GeometryProperty, ScaleInvarianceOfRatios) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(0.02, 0.9), side(1e-3, 0.1);
    for (int i = 0; i < 200; ++i) {
        const double di = r(rng), d_o = r(rng), h = 3 * r(rng), t = 3 * r(rng);
        const int n = 1 + static_cast<int>(rng() % 32);
        const auto a = array_from_ratios(side(rng), n, di, d_o, h, t, 1e-4);
        const auto b = array_from_ratios(side(rng), n, di, d_o, h, t, 1e-4);
        EXPECT_NEAR(a.cell.di_over_L(), b.cell.di_over_L(), 1e-14);
        EXPECT_NEAR(a.cell.do_over_L(), b.cell.do_over_L(), 1e-14);
        EXPECT_NEAR(a.cell.H_over_L(), b.cell.H_over_L(), 1e-14);
        EXPECT_NEAR(a.cell.t_over_L(), b.cell.t_over_L(), 1e-14);
        const double v = 1e-5 * r(rng);
        EXPECT_DOUBLE_EQ(per_nozzle_flow(v, n) * (static_cast<double>(n) * n), v);
    }
}
