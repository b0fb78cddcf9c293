#include "stofv/config.hpp"
#include "stofv/errors.hpp"
#include "stofv/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace stofv;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    unsigned threads = 0;
    std::string out;
};

/// Nonzero exit with a single `stofv-error code=<n> kind=<k> message=<json string>` line.
int fail(int code, const char* kind, const std::string& message) {
    std::cerr << "stofv-error code=" << code << " kind=" << kind << " message=" << json(message).dump() << '\n';
    return code;
}

struct Context {
    RunConfig config;
    std::string hash;
    std::uint64_t seed = 0;
    std::filesystem::path dir;
    unsigned threads = 1;

    std::string path(const std::string& name) const { return (dir / name).string(); }
};

Context load(const Options& o) {
    json j = json::object();
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw ConfigError("config: cannot open '" + o.config_path + "'");
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config: parse error: ") + e.what());
        }
    }
    for (const auto& s : o.overrides) apply_override(j, s);
    Context c;
    c.config = config_from_json(j);
    if (!o.out.empty()) c.config.output.dir = o.out;
    c.hash = config_hash(c.config);
    c.seed = c.config.noise.seed;
    c.dir = c.config.output.dir;
    c.threads = resolve_threads(o.threads > 0 ? o.threads : c.config.ensemble.threads);
    std::filesystem::create_directories(c.dir);
    write_json(c.path("config.json"), c.hash, c.seed, to_json(c.config));
    return c;
}

std::vector<double> initial_values(const Context& c, const Scheme& s) {
    std::vector<std::string> warnings;
    State s0 = init_state(build_initial(c.config), s.grid(), c.config.initial.quad_order, &warnings);
    for (const auto& w : warnings) std::cerr << "stofv-warning " << json(w).dump() << '\n';
    return s0.values;
}

int cmd_run(const Context& c) {
    const Scheme s = build_scheme(c.config);
    const TimeGrid time = build_time_grid(c.config, s);
    const auto v0 = initial_values(c, s);
    RunOptions opt;
    opt.keep_records = false;
    const Trajectory tr = run(s, v0, time, keyed_increments(c.seed, s.table().k_max()), opt, c.seed);

    std::vector<double> times = c.config.output.snapshots;
    times.push_back(time.T);
    ordered_json snaps = ordered_json::array();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t < 0.0 || t > time.T) throw ConfigError("output: snapshot time outside [0, T]");
        const std::size_t n = t >= time.T ? time.steps() : time.step_of(t);
        const std::string name = "snapshot_" + std::to_string(i) + ".csv";
        write_snapshot_csv(c.path(name), c.hash, c.seed, s.grid(), tr.states[n]);
        snaps.push_back({{"file", name}, {"requested_time", t}, {"step", n}, {"time", time.times[n]}});
    }
    if (s.grid().dim() == 1) {
        CsvWriter w(c.path("spacetime.csv"), c.hash, c.seed, {"n", "t", "i", "value"});
        for (std::size_t n = 0; n < tr.states.size(); ++n) {
            for (std::size_t k = 0; k < tr.states[n].size(); ++k) {
                w.row({static_cast<std::uint64_t>(n), time.times[n], static_cast<std::uint64_t>(k), tr.states[n][k]});
            }
        }
        w.close();
    }
    ordered_json manifest;
    manifest["grid"] = {{"dim", s.grid().dim()}, {"m", s.grid().cells_per_axis()}, {"h", s.grid().h()}};
    manifest["time"] = {{"T", time.T}, {"steps", time.steps()}, {"max_dt", time.max_dt()}};
    manifest["units"] = {{"x", "torus coordinate in [0,1)"}, {"t", "model time"}, {"value", "cell average of u"}};
    manifest["snapshots"] = snaps;
    write_json(c.path("manifest.json"), c.hash, c.seed, manifest);
    return 0;
}

int cmd_diagnose(const Context& c) {
    const Scheme s = build_scheme(c.config);
    const TimeGrid time = build_time_grid(c.config, s);
    const auto v0 = initial_values(c, s);
    const DiagnosticsReport r = diagnose_run(s, v0, time, keyed_increments(c.seed, s.table().k_max()), c.seed,
                                             c.config.time.theta, true);
    write_json(c.path("diagnostics.json"), c.hash, c.seed, diagnostics_json(r, c.config.diagnostics.steps));
    write_ledger_csv(c.path("ledger.csv"), c.hash, c.seed, r);
    if (r.max_energy_residual > 1e-8 || r.min_m < -1e-10 || r.max_mass_residual > 1e-12) {
        throw CflError("diagnose: discrete identities violated (energy residual " +
                       format_double(r.max_energy_residual) + ", min m " + format_double(r.min_m) + ")");
    }
    return 0;
}

int cmd_converge(const Context& c) {
    DeterministicStudy st{build_flux(c.config), build_numerical_flux(c.config), build_reference(c.config),
                          c.config.time.T, c.config.time.theta, 8, c.threads};
    const ConvergenceTable t = deterministic_convergence(st, c.config.converge.levels);
    write_convergence_csv(c.path("convergence.csv"), c.hash, c.seed, t);
    ordered_json j = convergence_json(t);
    j["reference"] = to_string(st.reference.kind());
    write_json(c.path("convergence.json"), c.hash, c.seed, j);
    return 0;
}

int cmd_mc(const Context& c) {
    const Scheme s = build_scheme(c.config);
    const TimeGrid time = build_time_grid(c.config, s);
    const auto v0 = initial_values(c, s);
    EnsembleConfig ec;
    ec.M = c.config.ensemble.M;
    ec.master_seed = c.seed;
    ec.threads = c.threads;
    ec.theta = c.config.time.theta;
    const EnsembleResult r = mc_ensemble(s, v0, time, ec);
    write_json(c.path("ensemble.json"), c.hash, c.seed, ensemble_json(r));
    CsvWriter w(c.path("ensemble_paths.csv"), c.hash, c.seed,
                {"path", "seed", "final_half_energy", "total_dissipation", "total_noise_input", "space_sum",
                 "time_flat_sum", "time_full_sum", "max_energy_residual"});
    for (std::size_t i = 0; i < r.paths.size(); ++i) {
        const auto& p = r.paths[i].report;
        w.row({static_cast<std::uint64_t>(i), r.paths[i].seed, p.final_half_energy, p.total_dissipation,
               p.total_noise_input, p.space_sum, p.time_flat_sum, p.time_full_sum, p.max_energy_residual});
    }
    w.close();
    return 0;
}

int cmd_couple(const Context& c) {
    CoupledStudyConfig cc;
    cc.levels = c.config.refinement.levels;
    cc.M = c.config.refinement.M;
    cc.p = c.config.refinement.p;
    cc.T = c.config.time.T;
    cc.theta = c.config.time.theta;
    cc.master_seed = c.seed;
    cc.threads = c.threads;
    cc.init_quad_order = c.config.initial.quad_order;
    const CoupledStudy st = coupled_refinement_study(c.config.grid.dim, build_flux(c.config),
                                                     build_numerical_flux(c.config), build_noise(c.config),
                                                     build_initial(c.config), cc);
    write_convergence_csv(c.path("couple.csv"), c.hash, c.seed, st.table);
    ordered_json j = convergence_json(st.table);
    j["decreasing_within_ci"] = st.decreasing_within_ci();
    write_json(c.path("couple.json"), c.hash, c.seed, j);
    return 0;
}

int cmd_validate_flux(const Context& c) {
    const FluxFunction f = build_flux(c.config);
    const MonotoneFaceFlux nf = build_numerical_flux(c.config);
    const AxiomReport r = validate_flux(nf, f, f.range_lo, f.range_hi, 201);
    ordered_json j;
    j["flux"] = f.name;
    j["scheme"] = c.config.flux.scheme;
    j["monotony_violation"] = r.monotony_violation;
    j["lipschitz_observed"] = r.lipschitz_observed;
    j["lipschitz_bound"] = r.lipschitz_bound;
    j["consistency_residual"] = r.consistency_residual;
    j["symmetry_residual"] = r.symmetry_residual;
    j["passed"] = r.passed();
    write_json(c.path("flux_axioms.json"), c.hash, c.seed, j);
    if (!r.passed()) throw CflError("validate-flux: flux axioms violated");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-volume solver for stochastic scalar conservation laws on the torus"};
    app.require_subcommand(1);
    Options opts;
    using Handler = int (*)(const Context&);
    const std::vector<std::tuple<const char*, const char*, Handler>> commands{
        {"run", "Compute one trajectory and write snapshots", cmd_run},
        {"diagnose", "Diagnostics report and per-step energy ledger", cmd_diagnose},
        {"converge", "Deterministic convergence table against the exact solution", cmd_converge},
        {"mc", "Monte Carlo ensemble statistics", cmd_mc},
        {"couple", "Coupled-path refinement study", cmd_couple},
        {"validate-flux", "Check the monotone flux axioms", cmd_validate_flux},
    };
    Handler selected = nullptr;
    for (const auto& [name, help, handler] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("config", opts.config_path, "JSON configuration file");
        sub->add_option("--set", opts.overrides, "Override a key, e.g. grid.m=64")->allow_extra_args(false);
        sub->add_option("--threads", opts.threads, "Worker threads (default: STOFV_THREADS, else all cores)");
        sub->add_option("--out", opts.out, "Output directory (overrides output.dir)");
        const Handler h = handler;
        sub->callback([&selected, h] { selected = h; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        return fail(2, "usage", e.what());
    }
    try {
        const Context ctx = load(opts);
        return selected(ctx);
    } catch (const ConfigError& e) {
        return fail(2, "config", e.what());
    } catch (const CflError& e) {
        return fail(3, "validation", e.what());
    } catch (const BlowupError& e) {
        return fail(4, "blowup", e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(2, "config", e.what());
    } catch (const std::exception& e) {
        return fail(1, "internal", e.what());
    }
}
