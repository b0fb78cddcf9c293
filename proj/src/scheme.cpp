#include "stofv/scheme.hpp"

#include "stofv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stofv {

double TimeGrid::max_dt() const { return dts.empty() ? 0.0 : *std::max_element(dts.begin(), dts.end()); }

std::size_t TimeGrid::step_of(double t) const {
    if (dts.empty()) {
        throw ConfigError("time grid: no steps");
    }
    if (t < 0.0 || t > T) {
        throw ConfigError("time grid: t outside [0, T]");
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto n = static_cast<std::size_t>(it - times.begin()) - 1;
    return std::min(n, dts.size() - 1);
}

TimeGrid uniform_time_grid(double dt, double T) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw ConfigError("time grid: T must be positive");
    }
    if (!(dt > 0.0)) {
        throw ConfigError("time grid: dt must be positive");
    }
    TimeGrid g;
    g.T = T;
    const double ratio = T / dt;
    auto full = static_cast<std::size_t>(std::floor(ratio));
    // Treat a remainder within rounding of zero as an exact tiling.
    double rest = T - static_cast<double>(full) * dt;
    if (std::abs(ratio - std::round(ratio)) < 1e-9) {
        full = static_cast<std::size_t>(std::llround(ratio));
        rest = 0.0;
    }
    g.times.push_back(0.0);
    for (std::size_t i = 0; i < full; ++i) {
        g.dts.push_back(dt);
        g.times.push_back(static_cast<double>(i + 1) * dt);
    }
    if (rest > 0.0) {
        g.dts.push_back(rest);
        g.times.push_back(T);
    }
    g.times.back() = T;
    if (g.dts.size() >= 2) {
        g.dts.back() = T - g.times[g.times.size() - 2];
    } else {
        g.dts.back() = T;
    }
    for (double d : g.dts) {
        if (d > 1.0) {
            throw ConfigError("time grid: steps must not exceed 1");
        }
    }
    return g;
}

double cfl_time_step(const TorusGrid& grid, double lipschitz, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) {
        throw ConfigError("time grid: theta must lie in (0, 1)");
    }
    if (!(lipschitz > 0.0)) {
        throw ConfigError("time grid: L_A must be positive");
    }
    const double a = grid.alpha();
    return (1.0 - theta) * a * a * grid.h() / (2.0 * lipschitz);
}

TimeGrid cfl_time_grid(const TorusGrid& grid, double lipschitz, double theta, double T) {
    return uniform_time_grid(cfl_time_step(grid, lipschitz, theta), T);
}

double cfl_number(const TorusGrid& grid, double dt, double lipschitz) {
    return dt * grid.boundary_measure() / grid.cell_volume() * lipschitz;
}

State init_state(const std::function<double(const Point&)>& u0, const TorusGrid& grid, std::size_t quad_order,
                 std::vector<std::string>* warnings) {
    State s;
    s.values.resize(grid.num_cells());
    bool outside = false;
    for (std::size_t c = 0; c < grid.num_cells(); ++c) {
        const CellQuadrature q = cell_quadrature(grid, c, quad_order);
        double acc = 0.0;
        for (std::size_t i = 0; i < q.points.size(); ++i) {
            const double u = u0(q.points[i]);
            outside = outside || std::abs(u) > 1.0;
            acc += q.weights[i] * u;
        }
        s.values[c] = acc;
    }
    if (outside && warnings != nullptr) {
        warnings->push_back("initial data leaves [-1, 1]");
    }
    return s;
}

// ---------------------------------------------------------------------------

Scheme::Scheme(TorusGrid grid, FluxFunction flux, MonotoneFaceFlux numerical_flux, NoiseModel noise)
    : grid_(std::move(grid)),
      flux_(std::move(flux)),
      nf_(std::move(numerical_flux)),
      noise_(std::move(noise)),
      table_(noise_, grid_) {
    if (flux_.dim != grid_.dim()) {
        throw ConfigError("scheme: flux and grid dimensions differ");
    }
    check_flux(flux_);
    for (int axis = 0; axis < grid_.dim(); ++axis) {
        for (int sign : {-1, 1}) {
            oriented_.emplace_back(nf_, flux_, axis, sign);
        }
    }
}

const OrientedFaceFlux& Scheme::oriented(int axis, int sign) const {
    return oriented_[static_cast<std::size_t>(2 * axis + (sign > 0 ? 1 : 0))];
}

std::vector<double> Scheme::half_step(std::span<const double> v, double dt) const {
    if (v.size() != grid_.num_cells()) {
        throw ConfigError("half_step: state size does not match the grid");
    }
    double speed = flux_.lipschitz;
    if (nf_.kind == FluxScheme::rusanov) {
        speed = std::max(speed, 0.5 * (flux_.lipschitz + oriented_.front().viscosity()));
    }
    const double cfl = cfl_number(grid_, dt, speed);
    if (cfl > 1.0 + 1e-12) {
        throw CflError("cfl number " + std::to_string(cfl) + " exceeds 1");
    }
    std::vector<double> acc(v.size(), 0.0);
    const double area = grid_.face_area();
    for (std::size_t c = 0; c < v.size(); ++c) {
        for (const Face& f : grid_.faces(c)) {
            if (f.sign < 0) {
                continue;
            }
            const double q = area * oriented(f.axis, f.sign).value(v[c], v[f.neighbor]);
            acc[c] += q;
            acc[f.neighbor] -= q;
        }
    }
    std::vector<double> half(v.size());
    const double ratio = dt / grid_.cell_volume();
    for (std::size_t c = 0; c < v.size(); ++c) {
        half[c] = v[c] - ratio * acc[c];
    }
    return half;
}

std::vector<double> Scheme::noise_step(std::span<const double> half, std::span<const double> pre, double dt,
                                       std::span<const double> X) const {
    return stochastic_step(half, pre, dt, table_, X);
}

StepRecord Scheme::step(std::span<const double> v, std::size_t n, double t, double dt,
                        std::span<const double> X) const {
    StepRecord r;
    r.n = n;
    r.t = t;
    r.dt = dt;
    r.pre.assign(v.begin(), v.end());
    r.half = half_step(v, dt);
    r.X.assign(X.begin(), X.end());
    r.post = noise_step(r.half, r.pre, dt, r.X);
    return r;
}

std::vector<double> deterministic_half_step(const Scheme& scheme, const State& state, double dt) {
    return scheme.half_step(state.values, dt);
}

std::vector<double> stochastic_step(std::span<const double> half, std::span<const double> pre, double dt,
                                    const CellNoiseTable& table, std::span<const double> X) {
    if (X.size() != table.k_max()) {
        throw ConfigError("stochastic_step: increment count does not match the noise model");
    }
    std::vector<double> out(half.begin(), half.end());
    if (table.k_max() == 0) {
        return out;
    }
    const double s = std::sqrt(dt);
    for (std::size_t c = 0; c < out.size(); ++c) {
        out[c] += s * table.contract(c, pre[c], X);
    }
    return out;
}

IncrementSource keyed_increments(std::uint64_t seed, std::size_t k_max) {
    return [seed, k_max](std::size_t n, double) { return sample_increments(seed, n, k_max); };
}

const std::vector<double>& Trajectory::at(double t) const {
    if (states.size() != time.steps() + 1) {
        throw ConfigError("trajectory: intermediate states were not kept");
    }
    if (t >= time.T) {
        return states.back();
    }
    return states[time.step_of(t)];
}

namespace {

void require_finite(std::span<const double> v, std::size_t n, const char* what) {
    for (std::size_t c = 0; c < v.size(); ++c) {
        if (!std::isfinite(v[c])) {
            throw BlowupError(std::string("non-finite ") + what + " value at step " + std::to_string(n) + " cell " +
                              std::to_string(c));
        }
    }
}

}  // namespace

Trajectory run(const Scheme& scheme, std::vector<double> v0, const TimeGrid& time, const IncrementSource& increments,
               const RunOptions& options, std::uint64_t seed) {
    if (v0.size() != scheme.grid().num_cells()) {
        throw ConfigError("run: initial state size does not match the grid");
    }
    require_finite(v0, 0, "initial");
    Trajectory tr;
    tr.time = time;
    tr.seed = seed;
    tr.states.push_back(v0);
    std::vector<double> v = std::move(v0);
    const std::size_t k_max = scheme.table().k_max();
    for (std::size_t n = 0; n < time.steps(); ++n) {
        std::vector<double> X = k_max > 0 ? increments(n, time.dts[n]) : std::vector<double>{};
        StepRecord r = scheme.step(v, n, time.times[n], time.dts[n], X);
        require_finite(r.half, n, "half-step");
        require_finite(r.post, n, "state");
        if (options.observer) {
            options.observer(r);
        }
        v = r.post;
        if (options.keep_states) {
            tr.states.push_back(v);
        }
        if (options.keep_records) {
            tr.records.push_back(std::move(r));
        }
    }
    if (!options.keep_states) {
        tr.states.push_back(v);
    }
    return tr;
}

std::vector<double> v_sharp(const StepRecord& record, const CellNoiseTable& table, std::span<const double> dbeta) {
    std::vector<double> out = record.half;
    if (table.k_max() == 0) {
        return out;
    }
    for (std::size_t c = 0; c < out.size(); ++c) {
        out[c] += table.contract(c, record.pre[c], dbeta);
    }
    return out;
}

std::vector<double> v_sharp(const StepRecord& record, const CellNoiseTable& table, std::uint64_t seed, double t) {
    const double s = t - record.t;
    if (s < -1e-14 * std::max(1.0, record.t) || s > record.dt * (1.0 + 1e-12)) {
        throw ConfigError("v_sharp: t outside the step");
    }
    if (s >= record.dt * (1.0 - 1e-12)) {
        return record.post;
    }
    const auto dbeta = brownian_value(seed, record.n, record.dt, record.X, std::max(s, 0.0));
    return v_sharp(record, table, dbeta);
}

std::vector<std::vector<double>> v_sharp_path(const StepRecord& record, const CellNoiseTable& table,
                                              std::uint64_t seed, std::size_t substeps) {
    const auto paths = brownian_bridge(seed, record.n, record.dt, record.X, substeps);
    std::vector<std::vector<double>> out;
    out.reserve(substeps + 1);
    std::vector<double> dbeta(record.X.size());
    for (std::size_t j = 0; j <= substeps; ++j) {
        for (std::size_t k = 0; k < dbeta.size(); ++k) {
            dbeta[k] = paths[k][j];
        }
        out.push_back(v_sharp(record, table, dbeta));
    }
    return out;
}

}  // namespace stofv
