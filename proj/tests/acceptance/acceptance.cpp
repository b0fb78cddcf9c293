/// Acceptance suite: one PASS/FAIL line per primary criterion, nonzero exit if any fails.

#include "stofv/config.hpp"
#include "stofv/harness.hpp"
#include "stofv/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

using namespace stofv;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> uniform_cells(std::size_t n, std::uint64_t seed, double a = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> U(-a, a);
    std::vector<double> v(n);
    for (double& x : v) x = U(gen);
    return v;
}

const InitialData sine_half = [](const Point& x) { return 0.5 * std::sin(2.0 * std::numbers::pi * x[0]); };

/// Energy balance, dissipation sign/support and the Lp identities share one 200-step run.
void check_pathwise_run() {
    const auto t0 = std::chrono::steady_clock::now();
    const Scheme s(build_grid(1, 32), burgers_flux(1), make_face_flux("godunov"), single_mode_noise(0.2));
    const double dt = cfl_time_step(s.grid(), s.lipschitz(), 0.5);
    const TimeGrid time = uniform_time_grid(dt, 200 * dt);
    const DiagnosticsReport r =
        diagnose_run(s, uniform_cells(32, 2026), time, keyed_increments(5, s.table().k_max()), 5, 0.5, true);
    const double elapsed = seconds_since(t0);
    report("energy_balance", r.steps.size() == 200 && r.max_energy_residual < 1e-8 && elapsed < 10.0,
           "steps=" + std::to_string(r.steps.size()) + " max_residual=" + num(r.max_energy_residual) +
               " runtime_s=" + num(elapsed));
    report("dissipation_sign_support", r.min_m >= -1e-10 && r.max_outside_m <= 1e-12,
           "min_m=" + num(r.min_m) + " max_|m|_outside=" + num(r.max_outside_m));
    report("lp_identities", r.max_lp_residual < 1e-8, "max_relative_residual(p=2,4)=" + num(r.max_lp_residual));
}

void check_two_cell() {
    const Scheme s(build_grid(1, 2), burgers_flux(1), make_face_flux("godunov"), zero_noise());
    const KineticScheme kin(s);
    const std::vector<double> v0{1.0, 0.0};
    const StepRecord r = s.step(v0, 0, 0.0, 1.0 / 32.0, {});
    const double m = DissipationMeasure(kin, r, 0)(0.5);
    const bool ok = std::abs(m - 0.25) <= 1e-12 && r.half[0] == 31.0 / 32.0 && r.half[1] == 1.0 / 32.0;
    report("two_cell_hand_value", ok,
           "m(0.5)=" + format_double(m) + " v_half=(" + format_double(r.half[0]) + "," + format_double(r.half[1]) +
               ")");
}

void check_flux_axioms() {
    double worst = 0.0;
    double mass = 0.0;
    bool ok = true;
    for (const char* name : {"godunov", "rusanov", "engquist_osher"}) {
        for (const FluxFunction& f : {burgers_flux(1), linear_flux({0.75}), burgers_flux(2), linear_flux({-0.5, 1.0})}) {
            const MonotoneFaceFlux nf = make_face_flux(name);
            const AxiomReport a = validate_flux(nf, f, -1.0, 1.0, 101, 1e-10);
            ok = ok && a.passed();
            worst = std::max({worst, a.monotony_violation, a.consistency_residual, a.symmetry_residual});
            const Scheme s(build_grid(f.dim, 16), f, nf, zero_noise());
            std::vector<double> v = uniform_cells(s.grid().num_cells(), 99);
            const double dt = cfl_time_step(s.grid(), s.lipschitz(), 0.5);
            for (int n = 0; n < 20; ++n) {
                const auto half = s.half_step(v, dt);
                double before = 0.0, after = 0.0, scale = 0.0;
                for (std::size_t c = 0; c < v.size(); ++c) {
                    before += v[c];
                    after += half[c];
                    scale += std::abs(v[c]);
                }
                mass = std::max(mass, std::abs(after - before) / scale);
                v = half;
            }
        }
    }
    ok = ok && mass < 1e-12;
    report("flux_axioms", ok, "max_axiom_residual=" + num(worst) + " max_relative_mass_change=" + num(mass));
}

void check_consistency_integrals() {
    double worst = 0.0;
    for (const char* name : {"godunov", "rusanov", "engquist_osher"}) {
        for (const FluxFunction& f : {burgers_flux(1), linear_flux({0.75})}) {
            const Scheme s(build_grid(1, 4), f, make_face_flux(name), zero_noise());
            const KineticScheme kin(s);
            std::mt19937_64 gen(314);
            std::uniform_real_distribution<double> U(-1.0, 1.0);
            for (int i = 0; i < 50; ++i) {
                const double v = U(gen);
                const double w = U(gen);
                for (int sign : {-1, 1}) {
                    const KineticFace& face = kin.face(0, sign);
                    worst = std::max({worst, std::abs(consistency_a1_residual(face, v, w)),
                                      consistency_a2_residual(face, v), support_residual(face, v, w)});
                }
            }
        }
    }
    report("kinetic_consistency_integrals", worst < 1e-8, "max_residual=" + num(worst));
}

void check_kinetic_half_step() {
    const Scheme s(build_grid(1, 16), burgers_flux(1), make_face_flux("godunov"), single_mode_noise(0.2));
    const KineticScheme kin(s);
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> C(-1.0, 1.0), R(0.1, 0.8);
    std::vector<TestFunction> bumps;
    for (int i = 0; i < 20; ++i) bumps.push_back({C(gen), R(gen)});
    const double dt = cfl_time_step(s.grid(), s.lipschitz(), 0.5);
    RunOptions opt;
    opt.keep_states = false;
    const Trajectory tr =
        run(s, uniform_cells(16, 8), uniform_time_grid(dt, 50 * dt), keyed_increments(8, 1), opt, 8);
    double worst = 0.0;
    for (const auto& rec : tr.records) {
        for (std::size_t c = 0; c < 16; ++c) {
            for (const auto& psi : bumps) worst = std::max(worst, std::abs(kinetic_residual(kin, rec, c, psi)));
        }
    }
    report("kinetic_half_step_residual", tr.records.size() == 50 && worst < 1e-8,
           "bumps=20 steps=" + std::to_string(tr.records.size()) + " max_residual=" + num(worst));
}

void check_expectation_energy_and_weak_bv() {
    const auto t0 = std::chrono::steady_clock::now();
    const Scheme s(build_grid(1, 16), burgers_flux(1), make_face_flux("godunov"), single_mode_noise(0.2));
    const auto v0 = init_state(sine_half, s.grid(), 4).values;
    const TimeGrid time = cfl_time_grid(s.grid(), s.lipschitz(), 0.5, 0.5);
    EnsembleConfig cfg;
    cfg.M = 1000;
    cfg.master_seed = 20261017;
    cfg.theta = 0.5;
    const EnsembleResult r = mc_ensemble(s, v0, time, cfg);
    const double elapsed = seconds_since(t0);
    const IdentityCheck& e = r.energy.total;
    report("expectation_energy_identity", e.within(3.0, 0.0) && elapsed < 120.0,
           "lhs=" + num(e.lhs.mean) + " rhs=" + num(e.rhs.mean) + " diff=" + num(e.difference.mean) +
               " se=" + num(e.difference.stderr_) + " runtime_s=" + num(elapsed));

    std::size_t pathwise = 0;
    for (const auto& p : r.paths) {
        if (!p.report.control_space_holds() || !p.report.control_space_bar_holds()) ++pathwise;
    }
    const bool space = r.space.mean <= r.space_bound + 3.0 * r.space.stderr_;
    const bool flat = r.time_flat.mean <= r.time_flat_bound + 3.0 * r.time_flat.stderr_;
    const bool full = r.time_full.mean <= r.time_full_bound + 3.0 * r.time_full.stderr_;
    report("weak_bv_bounds", space && flat && full && pathwise == 0,
           "space=" + num(r.space.mean) + "<=" + num(r.space_bound) + " time_flat=" + num(r.time_flat.mean) +
               "<=" + num(r.time_flat_bound) + " time_full=" + num(r.time_full.mean) + "<=" +
               num(r.time_full_bound) + " pathwise_control_failures=" + std::to_string(pathwise));
}

void check_deterministic_convergence() {
    DeterministicStudy st{burgers_flux(1), make_face_flux("godunov"), ReferenceSolution::burgers_riemann(1.0, 0.0, 0.5),
                          0.3};
    const ConvergenceTable t = deterministic_convergence(st, {16, 32, 64, 128});
    std::string errs;
    for (const auto& row : t.rows) errs += num(row.error) + " ";

    const std::vector<double> c{0.6};
    const Scheme s(build_grid(1, 64), linear_flux(c), make_face_flux("godunov"), zero_noise());
    const auto v0 = init_state([](const Point& x) { return std::sin(2.0 * std::numbers::pi * x[0]); }, s.grid()).values;
    const TimeGrid time = cfl_time_grid(s.grid(), s.lipschitz(), 0.5, 0.5);
    RunOptions opt;
    opt.keep_records = false;
    opt.keep_states = false;
    const Trajectory tr = run(s, v0, time, keyed_increments(0, 0), opt);
    const auto ref = upwind_reference(s.grid(), c, v0, time);
    double diff = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) diff = std::max(diff, std::abs(ref[i] - tr.final()[i]));
    report("deterministic_convergence", t.strictly_decreasing() && t.min_order() >= 0.6 && diff <= 1e-12,
           "l1_errors=" + errs + "min_order=" + num(t.min_order()) + " upwind_max_diff=" + num(diff));
}

void check_coupled_study() {
    const auto t0 = std::chrono::steady_clock::now();
    CoupledStudyConfig cfg;
    cfg.levels = {8, 16, 32, 64};
    cfg.M = 64;
    cfg.p = 1.0;
    cfg.T = 0.5;
    cfg.master_seed = 77;
    const auto flux = burgers_flux(1);
    const auto nf = make_face_flux("godunov");
    const CoupledStudy a = coupled_refinement_study(1, flux, nf, single_mode_noise(0.2), sine_half, cfg);
    cfg.threads = 1;
    const CoupledStudy b = coupled_refinement_study(1, flux, nf, single_mode_noise(0.2), sine_half, cfg);
    const double elapsed = seconds_since(t0);
    std::string errs;
    for (const auto& row : a.table.rows) errs += num(row.error) + "(se " + num(row.stderr_) + ") ";
    const bool same = a.path_errors == b.path_errors;
    report("coupled_self_convergence", a.decreasing_within_ci(2.0) && same && elapsed < 600.0,
           "errors=" + errs + "reproducible=" + (same ? "yes" : "no") + " runtime_s=" + num(elapsed));
}

void check_moments() {
    std::vector<TightnessReport> t;
    for (std::size_t m : {8, 16, 32}) {
        const Scheme s(build_grid(1, m), burgers_flux(1), make_face_flux("godunov"), single_mode_noise(0.2));
        const auto v0 = init_state(sine_half, s.grid(), 4).values;
        EnsembleConfig cfg;
        cfg.M = 100;
        cfg.master_seed = 5150;
        const EnsembleResult r = mc_ensemble(s, v0, cfl_time_grid(s.grid(), s.lipschitz(), 0.5, 0.5), cfg);
        t.push_back(r.tightness);
    }
    double worst = 0.0;
    for (std::size_t l = 1; l < t.size(); ++l) {
        for (std::size_t i = 1; i < kMomentPowers.size(); ++i) {
            worst = std::max(worst, t[l].sup_nu_moment[i].mean / t[l - 1].sup_nu_moment[i].mean);
            worst = std::max(worst, t[l].m_moment_sq[i].mean / t[l - 1].m_moment_sq[i].mean);
        }
    }
    report("moment_bounds", worst < 1.5, "max_refinement_ratio=" + num(worst));
}

}  // namespace

int main() {
    check_pathwise_run();
    check_two_cell();
    check_flux_axioms();
    check_consistency_integrals();
    check_kinetic_half_step();
    check_expectation_energy_and_weak_bv();
    check_deterministic_convergence();
    check_coupled_study();
    check_moments();
    std::printf("%d failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}
