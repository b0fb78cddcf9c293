#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stofv/config.hpp"
#include "stofv/errors.hpp"
#include "stofv/io.hpp"

namespace py = pybind11;
using namespace stofv;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

RunConfig parse_config(const py::object& cfg) {
    const std::string text = py::module_::import("json").attr("dumps")(cfg).cast<std::string>();
    return config_from_json(json::parse(text));
}

py::object to_python(const ordered_json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

/// Holds the Scheme so that Python can step it repeatedly.
class PyScheme {
public:
    explicit PyScheme(const py::object& cfg) : config_(parse_config(cfg)), scheme_(build_scheme(config_)) {}

    std::vector<double> initial() const {
        return init_state(build_initial(config_), scheme_.grid(), config_.initial.quad_order).values;
    }
    double cfl_dt() const { return cfl_time_step(scheme_.grid(), scheme_.lipschitz(), config_.time.theta); }
    std::vector<double> half_step(const std::vector<double>& v, double dt) const { return scheme_.half_step(v, dt); }
    py::dict step(const std::vector<double>& v, double dt, std::vector<double> X) const {
        if (X.empty()) X.assign(scheme_.table().k_max(), 0.0);
        const StepRecord r = scheme_.step(v, 0, 0.0, dt, X);
        py::dict d;
        d["pre"] = r.pre;
        d["half"] = r.half;
        d["post"] = r.post;
        return d;
    }
    /// m^0_K(ξ) for one deterministic step from `v`.
    double dissipation(const std::vector<double>& v, double dt, std::size_t cell, double xi) const {
        const StepRecord r = scheme_.step(v, 0, 0.0, dt, std::vector<double>(scheme_.table().k_max(), 0.0));
        const KineticScheme kin(scheme_);
        return DissipationMeasure(kin, r, cell)(xi);
    }
    std::size_t num_cells() const { return scheme_.grid().num_cells(); }

private:
    RunConfig config_;
    Scheme scheme_;
};

py::dict run_config(const py::object& cfg) {
    const RunConfig c = parse_config(cfg);
    const Scheme s = build_scheme(c);
    const TimeGrid time = build_time_grid(c, s);
    const auto v0 = init_state(build_initial(c), s.grid(), c.initial.quad_order).values;
    RunOptions opt;
    opt.keep_records = false;
    const Trajectory tr = run(s, v0, time, keyed_increments(c.noise.seed, s.table().k_max()), opt, c.noise.seed);
    py::dict d;
    d["times"] = time.times;
    d["states"] = tr.states;
    d["config_hash"] = config_hash(c);
    d["master_seed"] = c.noise.seed;
    return d;
}

py::object diagnose_config(const py::object& cfg, bool with_steps) {
    const RunConfig c = parse_config(cfg);
    const Scheme s = build_scheme(c);
    const auto v0 = init_state(build_initial(c), s.grid(), c.initial.quad_order).values;
    const DiagnosticsReport r = diagnose_run(s, v0, build_time_grid(c, s),
                                             keyed_increments(c.noise.seed, s.table().k_max()), c.noise.seed,
                                             c.time.theta, with_steps);
    return to_python(diagnostics_json(r, with_steps));
}

py::object converge_config(const py::object& cfg, unsigned threads) {
    const RunConfig c = parse_config(cfg);
    DeterministicStudy st{build_flux(c), build_numerical_flux(c), build_reference(c), c.time.T, c.time.theta, 8,
                          resolve_threads(threads)};
    return to_python(convergence_json(deterministic_convergence(st, c.converge.levels)));
}

py::object mc_config(const py::object& cfg, unsigned threads) {
    const RunConfig c = parse_config(cfg);
    const Scheme s = build_scheme(c);
    const auto v0 = init_state(build_initial(c), s.grid(), c.initial.quad_order).values;
    EnsembleConfig ec;
    ec.M = c.ensemble.M;
    ec.master_seed = c.noise.seed;
    ec.threads = threads;
    ec.theta = c.time.theta;
    return to_python(ensemble_json(mc_ensemble(s, v0, build_time_grid(c, s), ec)));
}

py::object couple_config(const py::object& cfg, unsigned threads) {
    const RunConfig c = parse_config(cfg);
    CoupledStudyConfig cc;
    cc.levels = c.refinement.levels;
    cc.M = c.refinement.M;
    cc.p = c.refinement.p;
    cc.T = c.time.T;
    cc.theta = c.time.theta;
    cc.master_seed = c.noise.seed;
    cc.threads = threads;
    cc.init_quad_order = c.initial.quad_order;
    const CoupledStudy st = coupled_refinement_study(c.grid.dim, build_flux(c), build_numerical_flux(c),
                                                     build_noise(c), build_initial(c), cc);
    ordered_json j = convergence_json(st.table);
    j["decreasing_within_ci"] = st.decreasing_within_ci();
    return to_python(j);
}

py::dict validate_flux_config(const py::object& cfg) {
    const RunConfig c = parse_config(cfg);
    const FluxFunction f = build_flux(c);
    const AxiomReport r = validate_flux(build_numerical_flux(c), f, f.range_lo, f.range_hi, 201);
    py::dict d;
    d["monotony_violation"] = r.monotony_violation;
    d["lipschitz_observed"] = r.lipschitz_observed;
    d["lipschitz_bound"] = r.lipschitz_bound;
    d["consistency_residual"] = r.consistency_residual;
    d["symmetry_residual"] = r.symmetry_residual;
    d["passed"] = r.passed();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite-volume scheme for stochastic scalar conservation laws on the torus";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CflError>(m, "CflError", PyExc_RuntimeError);
    py::register_exception<BlowupError>(m, "BlowupError", PyExc_ArithmeticError);

    m.def("canonical_config", [](const py::object& cfg) { return to_python(to_json(parse_config(cfg))); },
          "Validated configuration with every default filled in");
    m.def("config_hash", [](const py::object& cfg) { return config_hash(parse_config(cfg)); });
    m.def("godunov", [](const std::string& flux, double v, double w) {
        return godunov(make_flux(flux, 1), v, w, 0, 1);
    }, py::arg("flux"), py::arg("v"), py::arg("w"));
    m.def("riemann_solution", [](double ul, double ur, double x0, double x, double t) {
        return exact_solution(ReferenceSolution::burgers_riemann(ul, ur, x0), Point{x, 0.0}, t);
    }, py::arg("ul"), py::arg("ur"), py::arg("x0"), py::arg("x"), py::arg("t"));

    py::class_<PyScheme>(m, "Scheme")
        .def(py::init<const py::object&>(), py::arg("config"))
        .def("initial", &PyScheme::initial)
        .def("cfl_dt", &PyScheme::cfl_dt)
        .def("half_step", &PyScheme::half_step, py::arg("values"), py::arg("dt"))
        .def("step", &PyScheme::step, py::arg("values"), py::arg("dt"), py::arg("X") = std::vector<double>{})
        .def("dissipation", &PyScheme::dissipation, py::arg("values"), py::arg("dt"), py::arg("cell"), py::arg("xi"))
        .def_property_readonly("num_cells", &PyScheme::num_cells);

    m.def("run", &run_config, py::arg("config"));
    m.def("diagnose", &diagnose_config, py::arg("config"), py::arg("with_steps") = false);
    m.def("converge", &converge_config, py::arg("config"), py::arg("threads") = 0);
    m.def("mc", &mc_config, py::arg("config"), py::arg("threads") = 0);
    m.def("couple", &couple_config, py::arg("config"), py::arg("threads") = 0);
    m.def("validate_flux", &validate_flux_config, py::arg("config"));
}
