#include <doctest.h>

#include "stofv/kinetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace stofv;

namespace {

StepRecord make_record(const Scheme& s, std::vector<double> v, double dt) {
    return s.step(v, 0, 0.0, dt, std::vector<double>(s.table().k_max(), 0.0));
}

}  // namespace

TEST_CASE("hand-evaluated two-cell Burgers step") {
    const Scheme s(build_grid(1, 2), burgers_flux(1), make_face_flux("godunov"), zero_noise());
    const KineticScheme kin(s);
    const StepRecord r = make_record(s, {1.0, 0.0}, 1.0 / 32.0);
    const KineticFace& right = kin.face(0, 1);
    const KineticFace& left = kin.face(0, -1);
    CHECK(right.Phi(0.5, 1.0, 0.0) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(left.Phi(0.5, 1.0, 0.0) == 0.0);
    CHECK(right.a(0.5, 1.0, 0.0) == doctest::Approx(0.5));
    const DissipationMeasure m(kin, r, 0);
    CHECK(std::abs(m(0.5) - 0.25) < 1e-12);
    CHECK(m(1.5) == 0.0);
    const double lhs = 0.5 * 0.5 * (r.half[0] * r.half[0] + r.half[1] * r.half[1]);
    const double diss = r.dt * 0.5 * (m.mass() + DissipationMeasure(kin, r, 1).mass());
    CHECK(std::abs(lhs + diss - 0.25) < 1e-12);
}

TEST_CASE("kinetic face identities on sampled states") {
    for (const char* nf : {"godunov", "rusanov", "engquist_osher"}) {
        for (const FluxFunction& f : {burgers_flux(1), cubic_flux(1), linear_flux({-0.8})}) {
            const Scheme s(build_grid(1, 4), f, make_face_flux(nf), zero_noise());
            const KineticScheme kin(s);
            std::mt19937_64 gen(19);
            std::uniform_real_distribution<double> U(-1.1, 1.1);
            for (int sign : {-1, 1}) {
                const KineticFace& face = kin.face(0, sign);
                const KineticFace& back = kin.face(0, -sign);
                for (int i = 0; i < 30; ++i) {
                    const double v = U(gen);
                    const double w = U(gen);
                    const double xi = U(gen);
                    CAPTURE(nf);
                    CAPTURE(f.name);
                    CHECK(std::abs(consistency_a1_residual(face, v, w)) < 1e-10);
                    CHECK(consistency_a2_residual(face, v) < 1e-12);
                    CHECK(support_residual(face, v, w) == 0.0);
                    CHECK(face.Phi(xi, v, w) == doctest::Approx(face.Phi_quadrature(xi, v, w)).epsilon(1e-10));
                    CHECK(face.Phibar(xi, v, w) ==
                          doctest::Approx(face.Phibar_quadrature(xi, v, w)).epsilon(1e-10));
                    CHECK(face.Phibar(xi, v, w) ==
                          doctest::Approx(face.Phibar_bbar_quadrature(xi, v, w)).epsilon(1e-10));
                    CHECK(std::abs(face.abar(xi, v, w) - face.abar_explicit(xi, v, w)) < 1e-10);
                    CHECK(std::abs(face.a(xi, v, w) + back.a(xi, w, v)) < 1e-12);
                    CHECK(std::abs(face.Phi(xi, v, w) + back.Phi(xi, w, v)) < 1e-12);
                    CHECK(std::abs(face.a(xi, v, w)) <= f.lipschitz * face.area() + 1e-12);
                    CHECK(std::abs(face.bbar(U(gen), xi, v, w)) <= f.lipschitz * face.area() + 1e-12);
                    CHECK(face.weak_bv(v, w) >= -1e-14);
                    CHECK(face.weak_bv_bar(v, w) >= -1e-14);
                    CHECK(phi_square_gap(face, f.lipschitz, xi, v, w) >= -1e-12);
                }
            }
        }
    }
}

TEST_CASE("dissipation energy and Lp identities on random data") {
    for (int dim : {1, 2}) {
        const Scheme s(build_grid(dim, 6), burgers_flux(dim), make_face_flux("godunov"), zero_noise());
        const KineticScheme kin(s);
        std::mt19937_64 gen(23);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<double> v(s.grid().num_cells());
        for (double& x : v) x = U(gen);
        const double dt = cfl_time_step(s.grid(), s.lipschitz(), 0.5);
        const StepRecord r = make_record(s, v, dt);
        const double vol = s.grid().cell_volume();
        double e0 = 0.0, e1 = 0.0, diss = 0.0, l40 = 0.0, l41 = 0.0, d4 = 0.0;
        for (std::size_t c = 0; c < v.size(); ++c) {
            const DissipationMeasure m(kin, r, c);
            CHECK(m.min_value() >= -1e-10);
            CHECK(std::abs(m.raw(m.lo() - 0.05)) < 1e-12);
            CHECK(std::abs(m.raw(m.hi() + 0.05)) < 1e-12);
            e0 += 0.5 * vol * v[c] * v[c];
            e1 += 0.5 * vol * r.half[c] * r.half[c];
            l40 += vol * std::pow(v[c], 4);
            l41 += vol * std::pow(r.half[c], 4);
            diss += dt * vol * m.mass();
            d4 += 12.0 * dt * vol * m.moment(2.0);
        }
        CHECK(std::abs(e1 + diss - e0) < 1e-12);
        CHECK(std::abs(l41 + d4 - l40) < 1e-12 * l40);
    }
}

TEST_CASE("kinetic residual vanishes for bumps") {
    const Scheme s(build_grid(1, 2), burgers_flux(1), make_face_flux("godunov"), zero_noise());
    const KineticScheme kin(s);
    const StepRecord r = make_record(s, {1.0, 0.0}, 1.0 / 32.0);
    const TestFunction psi{0.5, 0.7};
    CHECK(std::abs(kinetic_residual(kin, r, 0, psi)) < 1e-12);
    CHECK(std::abs(kinetic_residual(kin, r, 1, psi)) < 1e-12);
    CHECK(kinetic_residual(kin, r, 0, TestFunction{2.5, 0.3}) == 0.0);
    const StepRecord c = make_record(s, {0.2, 0.2}, 1.0 / 32.0);
    CHECK(kinetic_residual(kin, c, 0, psi) == 0.0);
    CHECK(psi.primitive(10.0) == doctest::Approx(32.0 * 0.7 / 35.0));
}

TEST_CASE("discrete kinetic residual") {
    const Scheme det(build_grid(1, 8), burgers_flux(1), make_face_flux("godunov"), zero_noise());
    const KineticScheme kd(det);
    std::vector<double> v(8);
    for (std::size_t i = 0; i < 8; ++i) v[i] = 0.9 * std::sin(2 * std::numbers::pi * (i + 0.5) / 8);
    const double dt = cfl_time_step(det.grid(), det.lipschitz(), 0.5);
    const StepRecord r = make_record(det, v, dt);
    const TestFunction psi{0.1, 0.9};
    CHECK(std::abs(discrete_kinetic_residual(kd, r, 2, 5, 16, 16, psi)) < 1e-12);
    CHECK(discrete_kinetic_residual(kd, r, 2, 5, 0, 16, psi) == 0.0);

    const Scheme sto(build_grid(1, 8), burgers_flux(1), make_face_flux("godunov"), single_mode_noise(0.5));
    const KineticScheme ks(sto);
    std::vector<double> ratios;
    for (std::uint64_t path = 0; path < 100; ++path) {
        const std::vector<double> X{sample_increments(path, 0, 1)[0]};
        const StepRecord rs = sto.step(v, 0, 0.0, dt, X);
        const double r64 = std::abs(discrete_kinetic_residual(ks, rs, 1, path, 64, 64, psi));
        const double r256 = std::abs(discrete_kinetic_residual(ks, rs, 1, path, 256, 256, psi));
        ratios.push_back(r256 / r64);
    }
    std::sort(ratios.begin(), ratios.end());
    CHECK(ratios[50] < 0.9);
}

TEST_CASE("f_delta and nu_moment") {
    const Scheme s(build_grid(1, 4), burgers_flux(1), make_face_flux("godunov"), zero_noise());
    const std::vector<double> c(4, 0.3);
    const Trajectory tr = run(s, c, uniform_time_grid(0.01, 0.05), keyed_increments(1, 0));
    CHECK(nu_moment(tr, s, 0.023, 2.0) == doctest::Approx(1.09));
    CHECK(f_delta(tr, s, {0.4, 0.0}, 0.02, 0.2) == 1.0);
    CHECK(f_delta(tr, s, {0.4, 0.0}, 0.02, 0.4) == 0.0);

    const Scheme n(build_grid(1, 4), burgers_flux(1), make_face_flux("godunov"), single_mode_noise(0.5));
    std::vector<double> v{0.5, -0.2, 0.1, 0.0};
    const Trajectory tn = run(n, v, uniform_time_grid(0.01, 0.05), keyed_increments(3, 1), {}, 3);
    CHECK(f_delta(tn, n, {0.1, 0.0}, 0.02, 0.3) == (tn.states[2][0] > 0.3 ? 1.0 : 0.0));
    for (double xi = -1.0; xi < 1.0; xi += 0.01) {
        const double a = f_delta(tn, n, {0.1, 0.0}, 0.027, xi);
        const double b = f_delta(tn, n, {0.1, 0.0}, 0.027, xi + 0.01);
        CHECK(a >= b);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
    }
}
