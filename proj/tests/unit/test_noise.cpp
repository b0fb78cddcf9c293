#include <doctest.h>

#include "stofv/errors.hpp"
#include "stofv/noise.hpp"
#include "stofv/rng.hpp"

#include <cmath>
#include <numbers>

using namespace stofv;

TEST_CASE("philox4x32-10 known-answer vectors") {
    const auto z = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(z[0] == 0x6627e8d5u);
    CHECK(z[1] == 0xe169c58du);
    CHECK(z[2] == 0xbc57ac4cu);
    CHECK(z[3] == 0x9b00dbd8u);
    const auto f = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(f[0] == 0x408f276du);
    CHECK(f[1] == 0x41c83b0eu);
    CHECK(f[2] == 0xa20bc7c6u);
    CHECK(f[3] == 0x6d5451fdu);
}

TEST_CASE("cell table averages") {
    const TorusGrid g = build_grid(1, 2);
    const NoiseModel model = single_mode_noise(0.3);
    const CellNoiseTable t(model, g);
    for (double u : {-0.5, 0.0, 0.7}) {
        CHECK(t.g(0, 0, u) == doctest::Approx(2.0 / std::numbers::pi * 0.3 * (1 - u * u)).epsilon(1e-13));
        CHECK(t.g(0, 1, u) == doctest::Approx(-2.0 / std::numbers::pi * 0.3 * (1 - u * u)).epsilon(1e-13));
    }
    CHECK(t.g(0, 0, 1.0) == 0.0);
    CHECK(t.g(0, 0, -1.3) == 0.0);

    NoiseMode c;
    c.sigma = 0.5;
    c.shape = SpatialShape::constant;
    c.exponent = 2;
    const CellNoiseTable tc(make_noise_model({c}), build_grid(2, 3));
    CHECK(tc.g(0, 4, 0.5) == doctest::Approx(0.5 * 0.75 * 0.75));
}

TEST_CASE("cell table matches quadrature of a custom mode and the D0/D1 bounds") {
    NoiseMode a;
    a.sigma = 0.2;
    a.shape = SpatialShape::cosine;
    a.frequency = {1, 2};
    NoiseMode b;
    b.sigma = 0.1;
    b.shape = SpatialShape::sine;
    b.frequency = {2, -1};
    b.exponent = 3;
    const NoiseModel model = make_noise_model({a, b});
    CHECK(model.D0 == doctest::Approx(0.05));

    NoiseModel custom;
    custom.modes = {a, b};
    custom.modes[0].custom = [a](const Point& x, double u) { return a(x, u); };
    custom.modes[1].custom = [b](const Point& x, double u) { return b(x, u); };

    const TorusGrid g = build_grid(2, 4);
    const CellNoiseTable analytic(model, g);
    const CellNoiseTable quad(custom, g, 8);
    double worst_d1 = 0.0;
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
        for (double u : {-0.9, -0.2, 0.4, 0.95}) {
            for (std::size_t k = 0; k < 2; ++k) {
                CHECK(analytic.g(k, c, u) == doctest::Approx(quad.g(k, c, u)).epsilon(1e-9));
            }
            CHECK(analytic.G2(c, u) <= model.D0 + 1e-15);
            const auto q = cell_quadrature(g, c, 3);
            for (const auto& x : q.points) {
                double s = 0.0;
                for (std::size_t k = 0; k < 2; ++k) {
                    const double d = analytic.g(k, c, u) - model.modes[k](x, u);
                    s += d * d;
                }
                worst_d1 = std::max(worst_d1, s);
            }
        }
    }
    CHECK(worst_d1 <= model.D1 * g.h() * g.h());
}

TEST_CASE("children average to the parent") {
    const NoiseModel model = single_mode_noise(0.4);
    const Refinement r = refine(build_grid(1, 4));
    const CellNoiseTable coarse(model, r.coarse);
    const CellNoiseTable fine(model, r.fine);
    for (std::size_t p = 0; p < r.coarse.num_cells(); ++p) {
        double s = 0.0;
        for (std::size_t c : r.children[p]) {
            s += fine.g(0, c, 0.3) / static_cast<double>(r.children[p].size());
        }
        CHECK(s == doctest::Approx(coarse.g(0, p, 0.3)).epsilon(1e-13));
    }
}

TEST_CASE("increments are deterministic with unit moments") {
    CHECK(sample_increments(5, 3, 4) == sample_increments(5, 3, 4));
    CHECK(sample_increments(5, 3, 4) != sample_increments(6, 3, 4));
    const std::size_t n = 1000000;
    double s = 0.0;
    double s2 = 0.0;
    const WienerIncrements W(42);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = W.X(i / 4, i % 4);
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    CHECK(std::abs(mean) < 0.004);
    CHECK(std::abs(s2 / n - mean * mean - 1.0) < 0.005);
}

TEST_CASE("couple_time_refinement") {
    const std::vector<double> one{0.7};
    const std::vector<double> dt1{0.1};
    CHECK(couple_time_refinement(one, dt1, 0.1) == doctest::Approx(0.7));
    const std::vector<double> two{0.3, -1.1};
    const std::vector<double> dt2{0.05, 0.05};
    CHECK(couple_time_refinement(two, dt2, 0.1) == doctest::Approx((0.3 - 1.1) / std::sqrt(2.0)));
    CHECK_THROWS_AS(couple_time_refinement(two, dt2, 0.11), ConfigError);

    const WienerIncrements W(9);
    double s2 = 0.0;
    const std::size_t n = 100000;
    const std::vector<double> dts{0.25, 0.25, 0.5};
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> x{W.X(3 * i, 0), W.X(3 * i + 1, 0), W.X(3 * i + 2, 0)};
        const double c = couple_time_refinement(x, dts, 1.0);
        s2 += c * c;
    }
    CHECK(std::abs(s2 / n - 1.0) < 0.015);
}

TEST_CASE("brownian bridge is nested and pinned") {
    const std::vector<double> X{0.8, -0.3};
    const auto b4 = brownian_bridge(17, 2, 0.01, X, 4);
    const auto b16 = brownian_bridge(17, 2, 0.01, X, 16);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(b4[k][0] == 0.0);
        CHECK(b4[k][4] == doctest::Approx(0.1 * X[k]));
        for (std::size_t j = 0; j <= 4; ++j) {
            CHECK(b16[k][4 * j] == doctest::Approx(b4[k][j]).epsilon(1e-15));
        }
    }
    CHECK_THROWS_AS(brownian_bridge(1, 0, 0.1, X, 3), ConfigError);

    // Var(B(dt/2) | B(dt)) = dt/4.
    double s2 = 0.0;
    const std::vector<double> zero{0.0};
    for (std::uint64_t n = 0; n < 20000; ++n) {
        const auto b = brownian_bridge(3, n, 1.0, zero, 2);
        s2 += b[0][1] * b[0][1];
    }
    CHECK(std::abs(s2 / 20000 - 0.25) < 0.015);
}
