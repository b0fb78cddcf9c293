#include "stofv/config.hpp"

#include "stofv/errors.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace stofv {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

/// Reads the keys of one object, rejecting any key that is never consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError("config: '" + path_ + "' must be an object");
        }
    }
    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) {
                throw ConfigError("config: unknown key '" + path_ + "." + k + "'");
            }
        }
    }
    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config: bad value for '" + path_ + "." + key + "'");
        }
    }
    const json* child(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

SpatialShape parse_shape(const std::string& s) {
    if (s == "constant") return SpatialShape::constant;
    if (s == "sine") return SpatialShape::sine;
    if (s == "cosine") return SpatialShape::cosine;
    throw ConfigError("config: unknown noise shape '" + s + "'");
}

}  // namespace

ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["grid"] = {{"dim", c.grid.dim}, {"m", c.grid.m}};
    j["flux"] = {{"name", c.flux.name},
                 {"velocity", c.flux.velocity},
                 {"scheme", c.flux.scheme},
                 {"viscosity", c.flux.viscosity},
                 {"lipschitz", c.flux.lipschitz}};
    ordered_json modes = ordered_json::array();
    for (const auto& m : c.noise.modes) {
        modes.push_back(
            {{"sigma", m.sigma}, {"exponent", m.exponent}, {"shape", m.shape}, {"frequency", m.frequency}});
    }
    j["noise"] = {{"modes", modes}, {"seed", c.noise.seed}};
    j["time"] = {{"T", c.time.T}, {"theta", c.time.theta}, {"dt", c.time.dt}};
    j["initial"] = {{"name", c.initial.name},     {"value", c.initial.value}, {"amplitude", c.initial.amplitude},
                    {"frequency", c.initial.frequency}, {"left", c.initial.left},   {"right", c.initial.right},
                    {"x0", c.initial.x0},         {"radius", c.initial.radius}, {"seed", c.initial.seed},
                    {"pieces", c.initial.pieces}, {"quad_order", c.initial.quad_order}};
    j["diagnostics"] = {{"enabled", c.diagnostics.enabled}, {"steps", c.diagnostics.steps}};
    j["output"] = {{"dir", c.output.dir}, {"snapshots", c.output.snapshots}};
    j["ensemble"] = {{"M", c.ensemble.M}, {"threads", c.ensemble.threads}};
    j["refinement"] = {{"levels", c.refinement.levels}, {"M", c.refinement.M}, {"p", c.refinement.p}};
    j["converge"] = {{"levels", c.converge.levels}};
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    Section root(j, "config");
    if (const json* s = root.child("grid")) {
        Section g(*s, "grid");
        g.get("dim", c.grid.dim);
        g.get("m", c.grid.m);
    }
    if (const json* s = root.child("flux")) {
        Section f(*s, "flux");
        f.get("name", c.flux.name);
        f.get("velocity", c.flux.velocity);
        f.get("scheme", c.flux.scheme);
        f.get("viscosity", c.flux.viscosity);
        f.get("lipschitz", c.flux.lipschitz);
    }
    if (const json* s = root.child("noise")) {
        Section n(*s, "noise");
        n.get("seed", c.noise.seed);
        if (const json* modes = n.child("modes")) {
            if (!modes->is_array()) throw ConfigError("config: 'noise.modes' must be an array");
            for (const json& mj : *modes) {
                NoiseModeConfig m;
                Section ms(mj, "noise.modes[]");
                ms.get("sigma", m.sigma);
                ms.get("exponent", m.exponent);
                ms.get("shape", m.shape);
                ms.get("frequency", m.frequency);
                c.noise.modes.push_back(m);
            }
        }
    }
    if (const json* s = root.child("time")) {
        Section t(*s, "time");
        t.get("T", c.time.T);
        t.get("theta", c.time.theta);
        t.get("dt", c.time.dt);
    }
    if (const json* s = root.child("initial")) {
        Section i(*s, "initial");
        i.get("name", c.initial.name);
        i.get("value", c.initial.value);
        i.get("amplitude", c.initial.amplitude);
        i.get("frequency", c.initial.frequency);
        i.get("left", c.initial.left);
        i.get("right", c.initial.right);
        i.get("x0", c.initial.x0);
        i.get("radius", c.initial.radius);
        i.get("seed", c.initial.seed);
        i.get("pieces", c.initial.pieces);
        i.get("quad_order", c.initial.quad_order);
    }
    if (const json* s = root.child("diagnostics")) {
        Section d(*s, "diagnostics");
        d.get("enabled", c.diagnostics.enabled);
        d.get("steps", c.diagnostics.steps);
    }
    if (const json* s = root.child("output")) {
        Section o(*s, "output");
        o.get("dir", c.output.dir);
        o.get("snapshots", c.output.snapshots);
    }
    if (const json* s = root.child("ensemble")) {
        Section e(*s, "ensemble");
        e.get("M", c.ensemble.M);
        e.get("threads", c.ensemble.threads);
    }
    if (const json* s = root.child("refinement")) {
        Section r(*s, "refinement");
        r.get("levels", c.refinement.levels);
        r.get("M", c.refinement.M);
        r.get("p", c.refinement.p);
    }
    if (const json* s = root.child("converge")) {
        Section r(*s, "converge");
        r.get("levels", c.converge.levels);
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    try {
        return config_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("config: override must look like key.path=value");
    }
    std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    std::string pointer;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) {
        if (part.empty()) throw ConfigError("config: empty key segment in '" + key + "'");
        pointer += "/" + part;
    }
    try {
        j[json::json_pointer(pointer)] = value;
    } catch (const json::exception&) {
        throw ConfigError("config: cannot set '" + key + "'");
    }
}

void validate(const RunConfig& c) {
    if (c.grid.dim != 1 && c.grid.dim != 2) throw ConfigError("config: grid.dim must be 1 or 2");
    if (c.grid.m < 1) throw ConfigError("config: grid.m must be positive");
    if (!(c.time.T > 0.0) || !std::isfinite(c.time.T)) throw ConfigError("config: time.T must be positive");
    if (!(c.time.theta > 0.0 && c.time.theta < 1.0)) throw ConfigError("config: time.theta must lie in (0, 1)");
    if (c.time.dt < 0.0) throw ConfigError("config: time.dt must be non-negative");
    if (c.flux.name != "burgers" && c.flux.name != "linear" && c.flux.name != "cubic") {
        throw ConfigError("config: unknown flux '" + c.flux.name + "'");
    }
    if (c.flux.name == "linear" && c.flux.velocity.size() != static_cast<std::size_t>(c.grid.dim)) {
        throw ConfigError("config: flux.velocity needs one entry per axis");
    }
    make_face_flux(c.flux.scheme, c.flux.viscosity);
    for (const auto& m : c.noise.modes) {
        parse_shape(m.shape);
        if (m.exponent < 1) throw ConfigError("config: noise exponent must be >= 1");
        if (m.frequency.empty() || m.frequency.size() > 2) throw ConfigError("config: noise frequency has 1 or 2 entries");
    }
    static const std::set<std::string> initial{"constant", "sine", "riemann", "random", "bump"};
    if (!initial.count(c.initial.name)) throw ConfigError("config: unknown initial data '" + c.initial.name + "'");
    if (c.initial.quad_order < 1) throw ConfigError("config: initial.quad_order must be positive");
    if (c.ensemble.M < 2) throw ConfigError("config: ensemble.M must be at least 2");
    if (c.refinement.M < 2) throw ConfigError("config: refinement.M must be at least 2");
    if (!(c.refinement.p >= 1.0)) throw ConfigError("config: refinement.p must be >= 1");
}

std::string config_hash(const RunConfig& config) {
    RunConfig canonical = config;
    canonical.output.dir.clear();
    const std::string s = to_json(canonical).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

FluxFunction build_flux(const RunConfig& c) {
    FluxFunction f = make_flux(c.flux.name, c.grid.dim, c.flux.velocity);
    if (c.flux.lipschitz > 0.0) f.lipschitz = c.flux.lipschitz;
    return f;
}

MonotoneFaceFlux build_numerical_flux(const RunConfig& c) { return make_face_flux(c.flux.scheme, c.flux.viscosity); }

NoiseModel build_noise(const RunConfig& c) {
    if (c.noise.modes.empty()) return zero_noise();
    std::vector<NoiseMode> modes;
    for (const auto& mc : c.noise.modes) {
        NoiseMode m;
        m.sigma = mc.sigma;
        m.exponent = mc.exponent;
        m.shape = parse_shape(mc.shape);
        m.frequency = {mc.frequency[0], mc.frequency.size() > 1 ? mc.frequency[1] : 0};
        if (c.grid.dim == 1) m.frequency[1] = 0;
        modes.push_back(m);
    }
    return make_noise_model(std::move(modes));
}

Scheme build_scheme(const RunConfig& c) { return build_scheme(c, c.grid.m); }

Scheme build_scheme(const RunConfig& c, std::size_t m) {
    return Scheme(build_grid(c.grid.dim, m), build_flux(c), build_numerical_flux(c), build_noise(c));
}

InitialData build_initial(const RunConfig& c) {
    const InitialConfig& ic = c.initial;
    const int dim = c.grid.dim;
    if (ic.name == "constant") {
        const double v = ic.value;
        return [v](const Point&) { return v; };
    }
    if (ic.name == "sine") {
        const double a = ic.amplitude;
        const double k0 = ic.frequency.empty() ? 1.0 : ic.frequency[0];
        const double k1 = dim == 2 && ic.frequency.size() > 1 ? ic.frequency[1] : 0.0;
        return [a, k0, k1](const Point& x) { return a * std::sin(2.0 * std::numbers::pi * (k0 * x[0] + k1 * x[1])); };
    }
    if (ic.name == "riemann") {
        const double l = ic.left, r = ic.right, x0 = ic.x0;
        return [l, r, x0](const Point& x) { return x[0] - std::floor(x[0]) < x0 ? l : r; };
    }
    if (ic.name == "bump") {
        const double a = ic.amplitude, c0 = ic.x0, rad = ic.radius;
        return [a, c0, rad, dim](const Point& x) {
            double r2 = 0.0;
            for (int d = 0; d < dim; ++d) {
                double dx = std::abs(x[d] - std::floor(x[d]) - c0);
                dx = std::min(dx, 1.0 - dx);
                r2 += dx * dx;
            }
            const double s = 1.0 - r2 / (rad * rad);
            return s > 0.0 ? a * s * s * s : 0.0;
        };
    }
    // random: piecewise constant on a P^dim lattice with U(-a, a) values.
    const std::size_t P = ic.pieces > 0 ? ic.pieces : c.grid.m;
    std::size_t count = P;
    if (dim == 2) count *= P;
    std::mt19937_64 gen(ic.seed);
    std::uniform_real_distribution<double> U(-ic.amplitude, ic.amplitude);
    std::vector<double> values(count);
    for (double& v : values) v = U(gen);
    return [values, P, dim](const Point& x) {
        std::size_t idx = 0;
        for (int d = dim - 1; d >= 0; --d) {
            const double y = x[d] - std::floor(x[d]);
            const auto i = std::min(P - 1, static_cast<std::size_t>(y * static_cast<double>(P)));
            idx = idx * P + i;
        }
        return values[idx];
    };
}

TimeGrid build_time_grid(const RunConfig& c, const Scheme& scheme) {
    if (c.time.dt > 0.0) return uniform_time_grid(c.time.dt, c.time.T);
    return cfl_time_grid(scheme.grid(), scheme.lipschitz(), c.time.theta, c.time.T);
}

ReferenceSolution build_reference(const RunConfig& c) {
    if (c.flux.name == "linear") {
        std::vector<double> kinks;
        if (c.grid.dim == 1) {
            if (c.initial.name == "riemann") kinks = {0.0, c.initial.x0};
            if (c.initial.name == "bump") kinks = {c.initial.x0 - c.initial.radius, c.initial.x0 + c.initial.radius};
            if (c.initial.name == "random") {
                const std::size_t P = c.initial.pieces > 0 ? c.initial.pieces : c.grid.m;
                for (std::size_t i = 0; i < P; ++i) kinks.push_back(static_cast<double>(i) / static_cast<double>(P));
            }
        }
        return ReferenceSolution::linear_advection(c.grid.dim, c.flux.velocity, build_initial(c), kinks);
    }
    if (c.flux.name == "burgers" && c.grid.dim == 1 && c.initial.name == "riemann") {
        return ReferenceSolution::burgers_riemann(c.initial.left, c.initial.right, c.initial.x0);
    }
    if (c.initial.name == "constant") {
        std::vector<double> zero(static_cast<std::size_t>(c.grid.dim), 0.0);
        return ReferenceSolution::linear_advection(c.grid.dim, zero, build_initial(c));
    }
    throw ConfigError("config: no exact solution for flux '" + c.flux.name + "' with initial data '" + c.initial.name +
                      "'");
}

}  // namespace stofv
