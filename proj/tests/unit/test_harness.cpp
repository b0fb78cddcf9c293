#include <doctest.h>

#include "stofv/errors.hpp"
#include "stofv/harness.hpp"

#include <cmath>
#include <numbers>

using namespace stofv;

TEST_CASE("exact solutions") {
    const auto adv = ReferenceSolution::linear_advection(
        1, {1.0}, [](const Point& x) { return std::sin(2.0 * std::numbers::pi * x[0]); });
    for (double x : {0.0, 0.13, 0.7}) {
        CHECK(exact_solution(adv, {x, 0.0}, 0.5) == doctest::Approx(std::sin(2.0 * std::numbers::pi * (x - 0.5))));
    }
    const auto shock = ReferenceSolution::burgers_riemann(1.0, 0.0, 0.5);
    CHECK(shock.kind() == ReferenceKind::burgers_riemann);
    CHECK(shock.interaction_time() == doctest::Approx(1.0));
    // Shock at 0.5 + t/2, fan from 0 to t.
    CHECK(shock({0.649, 0.0}, 0.3) == 1.0);
    CHECK(shock({0.651, 0.0}, 0.3) == 0.0);
    CHECK(shock({0.15, 0.0}, 0.3) == doctest::Approx(0.5));
    CHECK(shock({0.95, 0.0}, 0.3) == 0.0);
    CHECK_THROWS_AS(shock({0.1, 0.0}, 1.5), ConfigError);
    const auto fan = ReferenceSolution::burgers_riemann(0.0, 1.0, 0.5);
    CHECK(fan.kind() == ReferenceKind::burgers_rarefaction);
    CHECK(fan({0.6, 0.0}, 0.2) == doctest::Approx(0.5));
    CHECK(fan({0.75, 0.0}, 0.2) == 1.0);
    CHECK(fan({0.4, 0.0}, 0.2) == 0.0);
    // Shock from 0 at speed 1/2 on the wrapped side.
    CHECK(fan({0.09, 0.0}, 0.2) == 1.0);
    CHECK(fan({0.11, 0.0}, 0.2) == 0.0);
    const auto k = shock.kinks(0.3);
    CHECK(k.size() == 3);
}

TEST_CASE("reference errors vanish on exact averages") {
    const auto shock = ReferenceSolution::burgers_riemann(1.0, 0.0, 0.5);
    const TorusGrid g = build_grid(1, 10);
    std::vector<double> v(10);
    for (std::size_t c = 0; c < 10; ++c) v[c] = shock({g.center(c)[0], 0.0}, 0.0);
    const ErrorNorms e0 = reference_errors(g, v, shock, 0.0);
    CHECK(e0.l1 == doctest::Approx(0.0));
    std::vector<double> zero(10, 0.0);
    CHECK(reference_errors(g, zero, shock, 0.3).l1 == doctest::Approx(0.65 - 0.15).epsilon(1e-12));
}

TEST_CASE("deterministic Burgers shock convergence") {
    DeterministicStudy st{burgers_flux(1), make_face_flux("godunov"), ReferenceSolution::burgers_riemann(1.0, 0.0, 0.5),
                          0.3};
    const ConvergenceTable t = deterministic_convergence(st, {16, 32, 64, 128});
    CHECK(t.strictly_decreasing());
    CHECK(t.min_order() >= 0.6);
    CHECK(t.rows[1].dt == 0.5 * t.rows[0].dt);
}

TEST_CASE("linear flux Godunov equals upwind") {
    for (int dim : {1, 2}) {
        const std::vector<double> c = dim == 1 ? std::vector<double>{0.7} : std::vector<double>{0.7, -0.4};
        const Scheme s(build_grid(dim, 16), linear_flux(c), make_face_flux("godunov"), zero_noise());
        const auto v0 = init_state([](const Point& x) { return std::sin(2.0 * std::numbers::pi * (x[0] + x[1])); },
                                   s.grid())
                            .values;
        const TimeGrid time = cfl_time_grid(s.grid(), s.lipschitz(), 0.5, 0.5);
        const Trajectory tr = run(s, v0, time, keyed_increments(0, 0));
        const auto ref = upwind_reference(s.grid(), c, v0, time);
        double diff = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) diff = std::max(diff, std::abs(ref[i] - tr.final()[i]));
        CHECK(diff < 1e-12);
    }
}

TEST_CASE("ensembles") {
    const Scheme s(build_grid(1, 8), burgers_flux(1), make_face_flux("godunov"), single_mode_noise(0.2));
    const auto v0 = init_state([](const Point& x) { return 0.5 * std::sin(2.0 * std::numbers::pi * x[0]); },
                               s.grid())
                        .values;
    const TimeGrid time = cfl_time_grid(s.grid(), s.lipschitz(), 0.5, 0.1);
    EnsembleConfig cfg;
    cfg.M = 8;
    cfg.master_seed = 11;
    cfg.threads = 1;
    const EnsembleResult a = mc_ensemble(s, v0, time, cfg);
    cfg.threads = 3;
    const EnsembleResult b = mc_ensemble(s, v0, time, cfg);
    for (std::size_t i = 0; i < cfg.M; ++i) CHECK(a.paths[i].final_state == b.paths[i].final_state);
    CHECK(a.lp_final[1].mean == b.lp_final[1].mean);
    CHECK(a.control_failures == 0);

    cfg.shared_seed = true;
    cfg.M = 2;
    const EnsembleResult same = mc_ensemble(s, v0, time, cfg);
    CHECK(same.paths[0].final_state == same.paths[1].final_state);

    const Scheme det(build_grid(1, 8), burgers_flux(1), make_face_flux("godunov"), zero_noise());
    cfg.shared_seed = false;
    cfg.M = 4;
    const EnsembleResult z = mc_ensemble(det, v0, time, cfg);
    CHECK(z.lp_final[1].stderr_ == 0.0);
}

TEST_CASE("coupled refinement study") {
    const InitialData u0 = [](const Point& x) { return 0.5 * std::sin(2.0 * std::numbers::pi * x[0]); };
    CoupledStudyConfig cfg;
    cfg.levels = {8, 16, 32};
    cfg.M = 6;
    cfg.T = 0.2;
    cfg.threads = 2;
    const auto flux = burgers_flux(1);
    const auto nf = make_face_flux("godunov");
    const CoupledStudy a = coupled_refinement_study(1, flux, nf, single_mode_noise(0.3), u0, cfg);
    cfg.threads = 1;
    const CoupledStudy b = coupled_refinement_study(1, flux, nf, single_mode_noise(0.3), u0, cfg);
    CHECK(a.path_errors == b.path_errors);
    CHECK(a.table.rows.size() == 2);
    CHECK(a.table.rows[0].error > 0.0);

    // Without noise every path equals the deterministic Cauchy difference.
    const CoupledStudy z = coupled_refinement_study(1, flux, nf, zero_noise(), u0, cfg);
    CHECK(z.table.rows[0].stderr_ == 0.0);
    CHECK(z.table.strictly_decreasing());
    const Scheme c(build_grid(1, 8), flux, nf, zero_noise());
    const Scheme f(build_grid(1, 16), flux, nf, zero_noise());
    const auto tc = run(c, init_state(u0, c.grid(), 4).values, cfl_time_grid(c.grid(), c.lipschitz(), 0.5, 0.2),
                        keyed_increments(0, 0));
    const auto tf = run(f, init_state(u0, f.grid(), 4).values, cfl_time_grid(f.grid(), f.lipschitz(), 0.5, 0.2),
                        keyed_increments(0, 0));
    CHECK(z.table.rows[0].error == coupled_error(refine(c.grid()), tc, tf, 1.0));

    cfg.levels = {8, 24};
    CHECK_THROWS_AS(coupled_refinement_study(1, flux, nf, zero_noise(), u0, cfg), ConfigError);
}

TEST_CASE("reference errors in 2D are area weighted") {
    const auto adv = ReferenceSolution::linear_advection(2, {1.0, 0.5}, [](const Point&) { return 0.25; });
    const TorusGrid g = build_grid(2, 4);
    const std::vector<double> v(g.num_cells(), 1.0);
    const ErrorNorms e = reference_errors(g, v, adv, 0.3);
    CHECK(e.l1 == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(e.l2 == doctest::Approx(0.75).epsilon(1e-14));
}
