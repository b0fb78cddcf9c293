#pragma once

#include "stofv/flux.hpp"
#include "stofv/mesh.hpp"
#include "stofv/noise.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace stofv {

/// Time steps Δt_0..Δt_{N_T-1} and nodes t_0 = 0 < ... < t_{N_T} = T.
struct TimeGrid {
    double T = 0.0;
    std::vector<double> dts;
    std::vector<double> times;

    std::size_t steps() const { return dts.size(); }
    double max_dt() const;
    /// Step index n with t in [t_n, t_{n+1}); T maps to the last step.
    std::size_t step_of(double t) const;
};

/// Uniform Δt with the last step shortened so that the steps sum to T.
TimeGrid uniform_time_grid(double dt, double T);

/// Δt = (1-θ) α_N² h / (2 L_A), trimmed to T.
double cfl_time_step(const TorusGrid& grid, double lipschitz, double theta);
TimeGrid cfl_time_grid(const TorusGrid& grid, double lipschitz, double theta, double T);

/// Δt |∂K| / |K| · L_A, which must not exceed 1.
double cfl_number(const TorusGrid& grid, double dt, double lipschitz);

struct State {
    std::vector<double> values;
    std::size_t n = 0;
    double t = 0.0;
};

/// v⁰_K = cell averages of u0. Appends a message to `warnings` if sampled u0 leaves [-1, 1].
State init_state(const std::function<double(const Point&)>& u0, const TorusGrid& grid, std::size_t quad_order = 3,
                 std::vector<std::string>* warnings = nullptr);

/// One full step: v^n, v^{n+1/2}, v^{n+1} and the increments X^{n+1} that produced it.
struct StepRecord {
    std::size_t n = 0;
    double t = 0.0;
    double dt = 0.0;
    std::vector<double> pre;
    std::vector<double> half;
    std::vector<double> post;
    std::vector<double> X;
};

/// Grid, flux, numerical flux and noise bundled for stepping.
class Scheme {
public:
    Scheme(TorusGrid grid, FluxFunction flux, MonotoneFaceFlux numerical_flux, NoiseModel noise);

    const TorusGrid& grid() const { return grid_; }
    const FluxFunction& flux() const { return flux_; }
    const MonotoneFaceFlux& numerical_flux() const { return nf_; }
    const NoiseModel& noise() const { return noise_; }
    const CellNoiseTable& table() const { return table_; }
    /// Oriented flux of the face with the given axis and sign.
    const OrientedFaceFlux& oriented(int axis, int sign) const;
    double lipschitz() const { return flux_.lipschitz; }

    /// |K|(v^{n+1/2}_K - v^n_K) + Δt Σ_L A_{K->L}(v^n_K, v^n_L) = 0. Throws CflError if Δt violates the CFL bound.
    std::vector<double> half_step(std::span<const double> v, double dt) const;
    /// v^{n+1}_K = v^{n+1/2}_K + √Δt Σ_k g_{k,K}(v^n_K) X_k.
    std::vector<double> noise_step(std::span<const double> half, std::span<const double> pre, double dt,
                                   std::span<const double> X) const;
    StepRecord step(std::span<const double> v, std::size_t n, double t, double dt, std::span<const double> X) const;

private:
    TorusGrid grid_;
    FluxFunction flux_;
    MonotoneFaceFlux nf_;
    NoiseModel noise_;
    CellNoiseTable table_;
    std::vector<OrientedFaceFlux> oriented_;  ///< index 2*axis + (sign > 0)
};

/// Free-function forms of the two sub-steps.
std::vector<double> deterministic_half_step(const Scheme& scheme, const State& state, double dt);
std::vector<double> stochastic_step(std::span<const double> half, std::span<const double> pre, double dt,
                                    const CellNoiseTable& table, std::span<const double> X);

/// Supplies X^{n+1} for step n of length dt.
using IncrementSource = std::function<std::vector<double>(std::size_t n, double dt)>;

/// Increments of WienerIncrements(seed).
IncrementSource keyed_increments(std::uint64_t seed, std::size_t k_max);

struct RunOptions {
    bool keep_records = true;
    bool keep_states = true;
    /// Called after every step; may be empty.
    std::function<void(const StepRecord&)> observer;
};

/// A computed path: v_δ(t) = v^n on [t_n, t_{n+1}).
struct Trajectory {
    TimeGrid time;
    std::vector<std::vector<double>> states;  ///< v^0..v^{N_T} when kept, else {v^0, v^{N_T}}
    std::vector<StepRecord> records;
    std::uint64_t seed = 0;

    const std::vector<double>& initial() const { return states.front(); }
    const std::vector<double>& final() const { return states.back(); }
    /// v_δ(t), left-constant in time. Needs all states.
    const std::vector<double>& at(double t) const;
};

/// Runs all steps of `time`. Throws BlowupError on a non-finite value, CflError on a CFL violation.
Trajectory run(const Scheme& scheme, std::vector<double> v0, const TimeGrid& time, const IncrementSource& increments,
               const RunOptions& options = {}, std::uint64_t seed = 0);

/// v^♯_K = v^{n+1/2}_K + Σ_k g_{k,K}(v^n_K) dβ_k, with dβ_k = β_k(t) - β_k(t_n).
std::vector<double> v_sharp(const StepRecord& record, const CellNoiseTable& table, std::span<const double> dbeta);
/// v^♯ at time t in [t_n, t_{n+1}] on the bridge keyed by `seed`.
std::vector<double> v_sharp(const StepRecord& record, const CellNoiseTable& table, std::uint64_t seed, double t);
/// v^♯ at the nodes t_n + j Δt_n / S, j = 0..S, on the dyadic bridge (S a power of two).
std::vector<std::vector<double>> v_sharp_path(const StepRecord& record, const CellNoiseTable& table,
                                              std::uint64_t seed, std::size_t substeps);

}  // namespace stofv
