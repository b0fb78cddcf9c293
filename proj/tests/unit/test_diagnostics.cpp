#include <doctest.h>

#include "stofv/diagnostics.hpp"
#include "stofv/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace stofv;

namespace {

std::vector<double> uniform_data(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = U(gen);
    return v;
}

}  // namespace

TEST_CASE("deterministic run diagnostics") {
    const Scheme s(build_grid(1, 32), burgers_flux(1), make_face_flux("godunov"), zero_noise());
    const auto v0 = uniform_data(32, 5);
    const TimeGrid time = cfl_time_grid(s.grid(), s.lipschitz(), 0.5, 0.2);
    const DiagnosticsReport r = diagnose_run(s, v0, time, keyed_increments(1, 0), 1, 0.5);
    CHECK(r.steps.size() == time.steps());
    CHECK(r.max_energy_residual < 1e-12);
    CHECK(r.max_mass_residual < 1e-12);
    CHECK(r.min_m >= -1e-10);
    CHECK(r.max_outside_m < 1e-12);
    CHECK(r.max_lp_residual < 1e-10);
    CHECK(r.max_split_residual < 1e-12);
    CHECK(r.total_noise_input == 0.0);
    CHECK(r.final_half_energy + r.total_dissipation == doctest::Approx(0.5 * r.initial_norm2).epsilon(1e-12));
    CHECK(r.control_space_holds());
    CHECK(r.control_space_bar_holds());
    CHECK(r.control_time_holds());
    CHECK(r.control_time_bar_holds());
    CHECK(r.space_sum <= r.space_bound());
    CHECK(r.time_flat_sum <= r.time_flat_bound());
    CHECK(r.time_full_sum <= r.time_full_bound());
    CHECK(r.closeness <= r.closeness_bound());
    CHECK(r.time_flat_sum == doctest::Approx(r.time_full_sum).epsilon(1e-14));
    for (std::size_t i = 0; i < kMomentPowers.size(); ++i) {
        CHECK(r.sup_nu_moment[i] >= 1.0 + r.lp_final[i]);
        CHECK(r.m_moment[i] > 0.0);
    }
    // With ψ=1 and ψ=ξ² the m_δ moments reduce to the energy and L4 dissipation.
    CHECK(r.m_moment[0] >= r.total_dissipation);
}

TEST_CASE("diagnose_trajectory agrees with the observer path") {
    const Scheme s(build_grid(1, 8), burgers_flux(1), make_face_flux("rusanov"), single_mode_noise(0.3));
    const auto v0 = uniform_data(8, 7);
    const TimeGrid time = cfl_time_grid(s.grid(), s.lipschitz(), 0.5, 0.1);
    const auto inc = keyed_increments(9, s.table().k_max());
    const DiagnosticsReport a = diagnose_run(s, v0, time, inc, 9, 0.5);
    RunOptions opt;
    opt.keep_records = true;
    const Trajectory tr = run(s, v0, time, inc, opt, 9);
    const DiagnosticsReport b = diagnose_trajectory(s, tr, 0.5, true);
    CHECK(a.total_dissipation == b.total_dissipation);
    CHECK(a.space_sum == b.space_sum);
    CHECK(a.sup_nu_moment[2] == b.sup_nu_moment[2]);
    CHECK(a.max_energy_residual < 1e-12);
    CHECK(a.total_noise_input > 0.0);
    const auto path = energy_balance_path(s, tr);
    CHECK(path.size() == time.steps());
}

TEST_CASE("noise energy input matches the realized increments in expectation") {
    const Scheme s(build_grid(1, 8), burgers_flux(1), make_face_flux("godunov"), single_mode_noise(0.4));
    const auto v0 = uniform_data(8, 2);
    const TimeGrid time = cfl_time_grid(s.grid(), s.lipschitz(), 0.5, 0.1);
    std::vector<DiagnosticsReport> reps;
    for (std::uint64_t i = 0; i < 400; ++i) {
        const std::uint64_t seed = derive_seed(77, i);
        reps.push_back(diagnose_run(s, v0, time, keyed_increments(seed, 1), seed, 0.5, false));
    }
    const EnergyIdentityReport e = energy_identity_mc(reps);
    CHECK(e.total.within(4.0));
    CHECK(e.noise_energy.within(4.0));
    CHECK(e.total.difference.stderr_ > 0.0);
    const TightnessReport t = tightness_moments(reps);
    CHECK(t.sup_nu_moment[1].mean > 1.0);
}

TEST_CASE("estimate") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const Estimate e = estimate(x);
    CHECK(e.mean == doctest::Approx(2.5));
    CHECK(e.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(e.count == 4);
}

TEST_CASE("report json") {
    const Scheme s(build_grid(1, 4), linear_flux({1.0}), make_face_flux("godunov"), zero_noise());
    const TimeGrid time = uniform_time_grid(0.05, 0.1);
    const DiagnosticsReport r = diagnose_run(s, uniform_data(4, 1), time, keyed_increments(1, 0), 1, 0.5);
    const std::string j = report_json(r, true);
    CHECK(j.find("\"steps\"") != std::string::npos);
    CHECK(j.find("\"weak_bv\"") != std::string::npos);
}
