#include "stofv/harness.hpp"

#include "stofv/errors.hpp"
#include "stofv/quadrature.hpp"
#include "stofv/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace stofv {

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("STOFV_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) {
            return static_cast<unsigned>(n);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_index = count;
    std::exception_ptr failure;
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(mu);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

// ---------------------------------------------------------------------------

std::string to_string(ReferenceKind kind) {
    switch (kind) {
        case ReferenceKind::linear_advection: return "linear_advection";
        case ReferenceKind::burgers_riemann: return "burgers_riemann";
        case ReferenceKind::burgers_rarefaction: return "burgers_rarefaction";
    }
    return "unknown";
}

namespace {

double wrap(double x) {
    double y = x - std::floor(x);
    return y >= 1.0 ? 0.0 : y;
}

/// Edges of a Riemann wave from c with states (l, r): shock at c + (l+r)/2 t, or the fan [c + l t, c + r t].
struct Wave {
    double c, l, r;
    bool shock() const { return l > r; }
    double left_speed() const { return shock() ? 0.5 * (l + r) : l; }
    double right_speed() const { return shock() ? 0.5 * (l + r) : r; }
};

}  // namespace

ReferenceSolution ReferenceSolution::linear_advection(int dim, std::vector<double> velocity, InitialData u0,
                                                      std::vector<double> kinks) {
    if (dim < 1 || dim > 2 || velocity.size() != static_cast<std::size_t>(dim)) {
        throw ConfigError("reference: velocity must have one entry per axis");
    }
    ReferenceSolution s;
    s.kind_ = ReferenceKind::linear_advection;
    s.dim_ = dim;
    s.velocity_ = std::move(velocity);
    s.u0_ = std::move(u0);
    s.kinks0_ = std::move(kinks);
    return s;
}

ReferenceSolution ReferenceSolution::burgers_riemann(double ul, double ur, double x0) {
    if (!(x0 > 0.0 && x0 < 1.0)) {
        throw ConfigError("reference: Riemann interface must lie in (0, 1)");
    }
    ReferenceSolution s;
    s.kind_ = ul > ur ? ReferenceKind::burgers_riemann : ReferenceKind::burgers_rarefaction;
    s.dim_ = 1;
    s.ul_ = ul;
    s.ur_ = ur;
    s.x0_ = x0;
    const Wave w1{x0, ul, ur};
    const Wave w2{0.0, ur, ul};
    // Gaps between consecutive wave edges close at a constant rate.
    double t_star = std::numeric_limits<double>::infinity();
    const double rate1 = w1.left_speed() - w2.right_speed();
    const double rate2 = w2.left_speed() - w1.right_speed();
    if (rate1 < 0.0) t_star = std::min(t_star, x0 / -rate1);
    if (rate2 < 0.0) t_star = std::min(t_star, (1.0 - x0) / -rate2);
    s.t_star_ = t_star;
    return s;
}

double ReferenceSolution::operator()(const Point& x, double t) const {
    if (t < 0.0) {
        throw ConfigError("reference: t must be non-negative");
    }
    if (kind_ == ReferenceKind::linear_advection) {
        Point y{0.0, 0.0};
        for (int d = 0; d < dim_; ++d) {
            y[d] = wrap(x[d] - velocity_[d] * t);
        }
        return u0_(y);
    }
    if (t > t_star_ * (1.0 + 1e-12)) {
        throw ConfigError("reference: waves interact before t");
    }
    const double xs = wrap(x[0]);
    if (t == 0.0) {
        return xs < x0_ ? ul_ : ur_;
    }
    const Wave w1{x0_, ul_, ur_};
    const Wave w2{0.0, ur_, ul_};
    // Coordinate y in [a, a+1) with a the left edge of the wave from 0.
    const double a = w2.left_speed() * t;
    double y = xs;
    while (y < a) y += 1.0;
    while (y >= a + 1.0) y -= 1.0;
    const double b2 = w2.right_speed() * t;
    if (y <= b2 && !w2.shock()) {
        return std::clamp(y / t, w2.l, w2.r);
    }
    const double a1 = x0_ + w1.left_speed() * t;
    const double b1 = x0_ + w1.right_speed() * t;
    if (w1.shock()) {
        return y < a1 ? ul_ : ur_;
    }
    if (y < a1) return ul_;
    if (y <= b1) return std::clamp((y - x0_) / t, w1.l, w1.r);
    return ur_;
}

std::vector<double> ReferenceSolution::kinks(double t) const {
    std::vector<double> k;
    if (kind_ == ReferenceKind::linear_advection) {
        if (dim_ == 1) {
            for (double p : kinks0_) k.push_back(wrap(p + velocity_[0] * t));
        }
    } else {
        const Wave w1{x0_, ul_, ur_};
        const Wave w2{0.0, ur_, ul_};
        for (const Wave& w : {w1, w2}) {
            k.push_back(wrap(w.c + w.left_speed() * t));
            k.push_back(wrap(w.c + w.right_speed() * t));
        }
    }
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

InitialData ReferenceSolution::initial() const {
    const ReferenceSolution self = *this;
    return [self](const Point& x) { return self(x, 0.0); };
}

double exact_solution(const ReferenceSolution& ref, const Point& x, double t) { return ref(x, t); }

ErrorNorms reference_errors(const TorusGrid& grid, std::span<const double> values, const ReferenceSolution& ref,
                            double t, std::size_t quad_order) {
    if (grid.dim() != ref.dim()) {
        throw ConfigError("reference: dimension mismatch");
    }
    ErrorNorms e;
    if (grid.dim() == 1) {
        const std::vector<double> kinks = ref.kinks(t);
        for (std::size_t c = 0; c < grid.num_cells(); ++c) {
            const double lo = grid.corner(c)[0];
            const double hi = lo + grid.h();
            const double v = values[c];
            e.l1 += integrate_piecewise([&](double x) { return std::abs(v - ref(Point{x, 0.0}, t)); }, lo, hi,
                                        kinks, quad_order);
            e.l2 += integrate_piecewise(
                [&](double x) {
                    const double d = v - ref(Point{x, 0.0}, t);
                    return d * d;
                },
                lo, hi, kinks, quad_order);
        }
    } else {
        for (std::size_t c = 0; c < grid.num_cells(); ++c) {
            const CellQuadrature q = cell_quadrature(grid, c, quad_order);
            for (std::size_t i = 0; i < q.points.size(); ++i) {
                const double d = values[c] - ref(q.points[i], t);
                e.l1 += grid.cell_volume() * q.weights[i] * std::abs(d);
                e.l2 += grid.cell_volume() * q.weights[i] * d * d;
            }
        }
    }
    e.l2 = std::sqrt(e.l2);
    return e;
}

// ---------------------------------------------------------------------------

bool ConvergenceTable::strictly_decreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i].error < rows[i - 1].error)) return false;
    }
    return true;
}

double ConvergenceTable::min_order() const {
    double o = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < rows.size(); ++i) o = std::min(o, rows[i].order);
    return o;
}

void fill_orders(ConvergenceTable& table) {
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        table.rows[i].level = i;
        if (i == 0) continue;
        const auto& a = table.rows[i - 1];
        auto& b = table.rows[i];
        const double hr = std::log2(a.h / b.h);
        b.order = std::log2(a.error / b.error) / hr;
        b.l2_order = std::log2(a.l2_error / b.l2_error) / hr;
    }
}

ConvergenceTable deterministic_convergence(const DeterministicStudy& study, const std::vector<std::size_t>& m_list) {
    if (m_list.empty()) {
        throw ConfigError("converge: empty level list");
    }
    const int dim = study.reference.dim();
    ConvergenceTable table;
    table.rows.resize(m_list.size());
    const InitialData u0 = study.reference.initial();
    parallel_for(m_list.size(), study.threads, [&](std::size_t i) {
        const Scheme scheme(build_grid(dim, m_list[i]), study.flux, study.numerical_flux, zero_noise());
        const TimeGrid time = cfl_time_grid(scheme.grid(), scheme.lipschitz(), study.theta, study.T);
        const State s0 = init_state(u0, scheme.grid(), study.init_quad_order);
        RunOptions opt;
        opt.keep_records = false;
        opt.keep_states = false;
        const Trajectory tr = run(scheme, s0.values, time, keyed_increments(0, 0), opt);
        const ErrorNorms e = reference_errors(scheme.grid(), tr.final(), study.reference, study.T);
        ConvergenceRow& row = table.rows[i];
        row.m = m_list[i];
        row.h = scheme.grid().h();
        row.dt = time.dts.front();
        row.M = 1;
        row.p = 1.0;
        row.error = e.l1;
        row.l2_error = e.l2;
    });
    fill_orders(table);
    return table;
}

std::vector<double> upwind_reference(const TorusGrid& grid, const std::vector<double>& velocity,
                                     std::vector<double> v0, const TimeGrid& time) {
    const std::size_t m = grid.cells_per_axis();
    const int dim = grid.dim();
    std::vector<double> v = std::move(v0);
    std::vector<double> next(v.size());
    for (double dt : time.dts) {
        const double r = dt / grid.h();
        for (std::size_t c = 0; c < v.size(); ++c) {
            double update = v[c];
            for (int d = 0; d < dim; ++d) {
                const std::size_t stride = d == 0 ? 1 : m;
                const std::size_t i = (c / stride) % m;
                const std::size_t up = c - i * stride + ((i + m - 1) % m) * stride;
                const std::size_t down = c - i * stride + ((i + 1) % m) * stride;
                const double a = velocity[d];
                update -= a >= 0.0 ? r * a * (v[c] - v[up]) : r * a * (v[down] - v[c]);
            }
            next[c] = update;
        }
        std::swap(v, next);
    }
    return v;
}

// ---------------------------------------------------------------------------

EnsembleResult mc_ensemble(const Scheme& scheme, const std::vector<double>& v0, const TimeGrid& time,
                           const EnsembleConfig& config) {
    if (config.M < 2) {
        throw ConfigError("mc: need at least two paths");
    }
    EnsembleResult res;
    res.paths.resize(config.M);
    const std::size_t k_max = scheme.table().k_max();
    parallel_for(config.M, resolve_threads(config.threads), [&](std::size_t i) {
        PathResult& p = res.paths[i];
        p.seed = config.shared_seed ? config.master_seed : derive_seed(config.master_seed, i);
        const KineticScheme kin(scheme);
        DiagnosticsAccumulator acc(config.theta, scheme.noise().D0, time.T, v0, scheme.grid().cell_volume(), false);
        RunOptions opt;
        opt.keep_records = false;
        opt.keep_states = false;
        opt.observer = [&](const StepRecord& r) { acc.add(diagnose_step(kin, r, p.seed)); };
        const Trajectory tr = run(scheme, v0, time, keyed_increments(p.seed, k_max), opt, p.seed);
        p.report = acc.finish();
        p.final_state = tr.final();
    });

    std::vector<DiagnosticsReport> reps;
    reps.reserve(config.M);
    for (const auto& p : res.paths) reps.push_back(p.report);
    for (std::size_t i = 0; i < kMomentPowers.size(); ++i) {
        std::vector<double> x;
        for (const auto& r : reps) x.push_back(r.lp_final[i]);
        res.lp_final[i] = estimate(x);
    }
    res.energy = energy_identity_mc(reps);
    res.tightness = tightness_moments(reps);
    std::vector<double> space, flat, full, close, resid;
    for (const auto& r : reps) {
        space.push_back(r.space_sum);
        flat.push_back(r.time_flat_sum);
        full.push_back(r.time_full_sum);
        close.push_back(r.closeness);
        resid.push_back(r.max_energy_residual);
        if (!(r.control_space_holds() && r.control_space_bar_holds() && r.control_time_holds() &&
              r.control_time_bar_holds())) {
            ++res.control_failures;
        }
    }
    res.space = estimate(space);
    res.time_flat = estimate(flat);
    res.time_full = estimate(full);
    res.closeness = estimate(close);
    res.max_energy_residual = estimate(resid);
    res.space_bound = reps.front().space_bound();
    res.time_flat_bound = reps.front().time_flat_bound();
    res.time_full_bound = reps.front().time_full_bound();
    res.closeness_bound = reps.front().closeness_bound();
    return res;
}

// ---------------------------------------------------------------------------

double coupled_error(const Refinement& refinement, const Trajectory& coarse, const Trajectory& fine, double p) {
    if (coarse.states.size() != coarse.time.steps() + 1 || fine.states.size() != fine.time.steps() + 1) {
        throw ConfigError("couple: full state histories are required");
    }
    const double vol = refinement.fine.cell_volume();
    double err = 0.0;
    for (std::size_t j = 0; j < fine.time.steps(); ++j) {
        const auto& vf = fine.states[j];
        const auto& vc = coarse.states[coarse.time.step_of(fine.time.times[j])];
        double s = 0.0;
        for (std::size_t c = 0; c < vf.size(); ++c) {
            s += vol * std::pow(std::abs(vf[c] - vc[refinement.parent[c]]), p);
        }
        err += fine.time.dts[j] * s;
    }
    return err;
}

bool CoupledStudy::decreasing_within_ci(double k) const {
    for (std::size_t i = 1; i < path_errors.size(); ++i) {
        std::vector<double> d(path_errors[i].size());
        for (std::size_t j = 0; j < d.size(); ++j) d[j] = path_errors[i - 1][j] - path_errors[i][j];
        const Estimate e = estimate(d);
        if (!(e.mean > k * e.stderr_) || !(table.rows[i].error < table.rows[i - 1].error)) return false;
    }
    return true;
}

CoupledStudy coupled_refinement_study(int dim, const FluxFunction& flux, const MonotoneFaceFlux& numerical_flux,
                                      const NoiseModel& noise, const InitialData& u0, const CoupledStudyConfig& config) {
    const auto& levels = config.levels;
    if (levels.size() < 2) {
        throw ConfigError("couple: need at least two levels");
    }
    for (std::size_t l = 1; l < levels.size(); ++l) {
        if (levels[l] != 2 * levels[l - 1]) {
            throw ConfigError("couple: levels must be nested (each m doubles the previous)");
        }
    }
    if (config.M < 2) {
        throw ConfigError("couple: need at least two paths");
    }
    if (!(config.p >= 1.0)) {
        throw ConfigError("couple: p must be at least 1");
    }
    const std::size_t L = levels.size();
    std::vector<Scheme> schemes;
    schemes.reserve(L);
    std::vector<TimeGrid> times;
    std::vector<std::vector<double>> initial;
    std::vector<Refinement> refinements;
    for (std::size_t l = 0; l < L; ++l) {
        schemes.emplace_back(build_grid(dim, levels[l]), flux, numerical_flux, noise);
        times.push_back(cfl_time_grid(schemes[l].grid(), schemes[l].lipschitz(), config.theta, config.T));
        initial.push_back(init_state(u0, schemes[l].grid(), config.init_quad_order).values);
        if (l > 0) refinements.push_back(refine(schemes[l - 1].grid()));
    }
    const std::size_t k_max = schemes.front().table().k_max();
    const TimeGrid& finest = times.back();

    CoupledStudy study;
    study.path_errors.assign(L - 1, std::vector<double>(config.M));
    parallel_for(config.M, resolve_threads(config.threads), [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(config.master_seed, i);
        const WienerIncrements W(seed);
        std::vector<std::vector<double>> fineX(finest.steps());
        for (std::size_t n = 0; n < finest.steps(); ++n) fineX[n] = W.step(n, k_max);

        std::vector<Trajectory> paths;
        for (std::size_t l = 0; l < L; ++l) {
            const TimeGrid& tg = times[l];
            // Fine steps grouped by the step of this level that contains them.
            std::vector<std::vector<std::size_t>> groups(tg.steps());
            for (std::size_t j = 0; j < finest.steps(); ++j) {
                groups[tg.step_of(finest.times[j])].push_back(j);
            }
            std::vector<std::vector<double>> X(tg.steps(), std::vector<double>(k_max));
            for (std::size_t n = 0; n < tg.steps(); ++n) {
                std::vector<double> dts;
                for (std::size_t j : groups[n]) dts.push_back(finest.dts[j]);
                for (std::size_t k = 0; k < k_max; ++k) {
                    std::vector<double> x;
                    for (std::size_t j : groups[n]) x.push_back(fineX[j][k]);
                    X[n][k] = couple_time_refinement(x, dts, tg.dts[n]);
                }
            }
            RunOptions opt;
            opt.keep_records = false;
            opt.keep_states = true;
            paths.push_back(run(schemes[l], initial[l], tg, [&X](std::size_t n, double) { return X[n]; }, opt, seed));
        }
        for (std::size_t l = 0; l + 1 < L; ++l) {
            study.path_errors[l][i] = coupled_error(refinements[l], paths[l], paths[l + 1], config.p);
        }
    });

    for (std::size_t l = 0; l + 1 < L; ++l) {
        const Estimate e = estimate(study.path_errors[l]);
        ConvergenceRow row;
        row.m = levels[l];
        row.h = schemes[l].grid().h();
        row.dt = times[l].dts.front();
        row.M = config.M;
        row.p = config.p;
        row.error = e.mean;
        row.stderr_ = e.stderr_;
        study.table.rows.push_back(row);
    }
    fill_orders(study.table);
    for (auto& row : study.table.rows) {
        row.l2_error = std::numeric_limits<double>::quiet_NaN();
        row.l2_order = std::numeric_limits<double>::quiet_NaN();
    }
    return study;
}

}  // namespace stofv
