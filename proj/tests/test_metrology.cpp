#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "jetcool/metrology.hpp"

using namespace jetcool;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ChipStack stack() { return {0.2e-3, 149.0, 0.48e-4}; }

}  // namespace

TEST(Metrology, DiodeDeltaT) {
    EXPECT_NEAR(sensor_delta_t(DiodeModel{}, 600.0 - 15.5, 600.0), 10.0, 1e-12);
    EXPECT_EQ(sensor_delta_t(DiodeModel{}, 600.0, 600.0), 0.0);
    try {
        sensor_delta_t(DiodeModel{0.0}, 1.0, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_model);
    }
}

TEST(Metrology, TcrDeltaT) {
    EXPECT_NEAR(sensor_delta_t(TcrModel{}, 101.7765, 100.0), 5.0, 1e-12);
    EXPECT_EQ(sensor_delta_t(TcrModel{}, 100.0, 100.0), 0.0);
    EXPECT_THROW(sensor_delta_t(TcrModel{100.0, 0.0, 25.0}, 101.0, 100.0), Error);
    EXPECT_THROW(sensor_delta_t(TcrModel{}, 101.0, 0.0), Error);
}

TEST(Metrology, ReferenceMapShape) {
    EXPECT_THROW(sensor_to_dT(DiodeModel{}, {1.0, 2.0}, {1.0}), Error);
    EXPECT_THROW(sensor_to_dT(DiodeModel{}, {}, {}), Error);
    const auto d = sensor_to_dT(DiodeModel{}, {-3.1, -1.55}, {0.0, 0.0});
    EXPECT_NEAR(d[0], 2.0, 1e-12);
    EXPECT_NEAR(d[1], 1.0, 1e-12);
}

TEST(MetrologyProperty, SensorLinearInDelta) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 500; ++i) {
        const double off = 500 + u(rng), delta = u(rng), k = 0.1 + std::abs(u(rng)) / 10;
        const double a = sensor_delta_t(DiodeModel{}, off + delta, off);
        const double b = sensor_delta_t(DiodeModel{}, off + k * delta, off);
        EXPECT_NEAR(b, k * a, 1e-9 * (1 + std::abs(k * a)));
        const double ra = sensor_delta_t(TcrModel{}, 100 + delta / 50, 100);
        const double rb = sensor_delta_t(TcrModel{}, 100 + k * delta / 50, 100);
        EXPECT_NEAR(rb, k * ra, 1e-9 * (1 + std::abs(k * ra)));
    }
}

TEST(Metrology, ReduceSteps) {
    // Chip 10 K above ambient with R_loss 16.8 K/W.
    const auto r = reduce({20.0, 20.0}, 50.595238095238095, 20.0, 10.0, 16.8, stack());
    EXPECT_NEAR(r.q_loss, 10.0 / 16.8, 1e-12);
    EXPECT_NEAR(r.q_loss, 0.595, 5e-4);
    EXPECT_NEAR(r.q_net, 50.0, 1e-12);
    EXPECT_NEAR(r.t_chip - r.t_s, 50.0 * 0.2e-3 / (0.48e-4 * 149.0), 1e-12);
    EXPECT_NEAR(r.t_chip - r.t_s, 1.3982102908277405, 1e-12);
    EXPECT_NEAR(r.r_th, 20.0 / 50.595238095238095, 1e-15);
    EXPECT_NEAR(50.0 / (0.48e-4 * 15.0), 69444.44444444444, 1e-8);
}

TEST(Metrology, ReduceErrors) {
    try {
        reduce({0.5}, 100.0, 25.0, 10.0, 16.8, stack());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::non_physical);
        EXPECT_EQ(exit_code(e.kind()), 3);
    }
    EXPECT_THROW(reduce({}, 1.0, 25.0, 10.0, 16.8, stack()), Error);
    EXPECT_THROW(reduce({5.0}, 0.0, 25.0, 10.0, 16.8, stack()), Error);
    EXPECT_THROW(reduce({5.0}, 1.0, 25.0, 10.0, 0.0, stack()), Error);
}

TEST(MetrologyProperty, ReduceEnergyBookkeeping) {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> dT(1 + rng() % 64);
        for (auto& v : dT) v = 5 + 40 * u(rng);
        const double power = 5 + 200 * u(rng), t_in = 10 + 20 * u(rng), t_amb = 20 + 10 * u(rng);
        const ChipStack c{1e-4 * u(rng), 100 + 50 * u(rng), 1e-5 + 1e-4 * u(rng)};
        try {
            const auto r = reduce(dT, power, t_amb, t_in, 16.8, c);
            EXPECT_LT(rel(r.htc * c.heated_area * (r.t_s - t_in) + r.q_loss, power), 1e-12);
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::non_physical);
        }
    }
}

TEST(Metrology, Propagate) {
    EXPECT_NEAR(propagate({0.001, 0.015}), 0.015033296378372907, 1e-15);
    EXPECT_NEAR(propagate({0.001, 0.0213, 0.015}), 0.02607086496455382, 1e-15);
    EXPECT_NEAR(100 * propagate({0.001, 0.015}), 1.51, 0.02);
    EXPECT_NEAR(100 * propagate({0.001, 0.0213, 0.015}), 2.61, 0.02);
    EXPECT_EQ(propagate({0.042}), 0.042);
    EXPECT_THROW(propagate(std::vector<double>{}), Error);
    EXPECT_THROW(propagate({0.01, -0.01}), Error);
}

TEST(MetrologyProperty, RssBounds) {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(0.0, 0.1);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> c(1 + rng() % 8);
        double mx = 0, sum = 0;
        for (auto& v : c) {
            v = u(rng);
            mx = std::max(mx, v);
            sum += v;
        }
        const double r = propagate(c);
        EXPECT_GE(r, mx);
        EXPECT_LE(r, sum * (1 + 1e-15));
    }
}

TEST(Metrology, GciWorkedTriple) {
    const auto g = gci(0.85, 0.9, 1.0, 2.0);
    EXPECT_NEAR(g.p, 1.0, 1e-12);
    EXPECT_NEAR(g.gci23, 1.25 * 2.0 / 1.0 * (0.1 / 0.9), 1e-12);
    EXPECT_NEAR(g.gci23, 0.2778, 1e-4);
    EXPECT_TRUE(g.in_asymptotic_range);
}

TEST(MetrologyProperty, GciExactOrder) {
    for (double p : {0.5, 1.0, 2.0, 3.0})
        for (double r : {1.3, 1.5, 2.0, 3.0})
            for (double C : {-2.0, 0.7}) {
                const double h = 0.01;
                auto f = [&](double hh) { return 4.0 + C * std::pow(hh, p); };
                const auto g = gci(f(h), f(h * r), f(h * r * r), r);
                EXPECT_LT(rel(g.p, p), 1e-8) << p << " " << r;
                EXPECT_NEAR(g.asymptotic_ratio, 1.0, 1e-10);
            }
    const auto g2 = gci(1.0 + 0.25, 1.0 + 1.0, 1.0 + 4.0, 2.0);
    EXPECT_NEAR(g2.p, 2.0, 1e-10);
    EXPECT_NEAR(g2.asymptotic_ratio, 1.0, 1e-10);
}

TEST(Metrology, GciErrors) {
    for (auto t : {std::array<double, 3>{1.0, 1.0, 2.0}, {1.0, 2.0, 1.5}, {1.0, 2.0, 2.5}}) {
        try {
            gci(t[0], t[1], t[2], 2.0);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::non_monotone_convergence);
        }
    }
    EXPECT_THROW(gci(1.0, 2.0, 4.0, 1.0), Error);
}

TEST(Metrology, AsymptoticRangeThreshold) {
    EXPECT_TRUE(in_asymptotic_range(0.99));
    EXPECT_TRUE(in_asymptotic_range(1.01));
    EXPECT_TRUE(in_asymptotic_range(1.049));
    EXPECT_FALSE(in_asymptotic_range(1.06));
    EXPECT_FALSE(in_asymptotic_range(0.94));
    EXPECT_FALSE(in_asymptotic_range(1.01, 0.005));
}

TEST(Metrology, SensorDataset) {
    std::stringstream ss("# model=diode\n# sensitivity_mV_C=-1.55\n# power_W=50\nrow,col,reading_on,reading_off\n"
                         "0,0,584.5,600\n0,1,585,600\n");
    const auto ds = read_sensor_dataset(ss);
    EXPECT_EQ(ds.number("power_W"), 50.0);
    const auto dT = sensor_to_dT(ds.map);
    ASSERT_EQ(dT.size(), 2u);
    EXPECT_NEAR(dT[0], 10.0, 1e-12);

    std::stringstream tcr("# model=tcr\n# r0_ohm=100\n# tcr_ppm_C=3553\nrow,col,reading_on,reading_off\n0,0,101.7765,\n");
    const auto dt = read_sensor_dataset(tcr);
    EXPECT_NEAR(sensor_to_dT(dt.map)[0], 5.0, 1e-12);

    std::stringstream empty("row,col,reading_on,reading_off\n");
    EXPECT_THROW(read_sensor_dataset(empty), Error);
    std::stringstream bad("# model=thermocouple\nrow,col,reading_on,reading_off\n0,0,1,1\n");
    EXPECT_THROW(read_sensor_dataset(bad), Error);
}
