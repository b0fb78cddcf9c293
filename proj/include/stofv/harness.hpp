#pragma once

#include "stofv/diagnostics.hpp"
#include "stofv/scheme.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace stofv {

using InitialData = std::function<double(const Point&)>;

/// Worker count: `requested` if positive, else STOFV_THREADS, else the hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Rethrows the exception of the lowest failing index.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

enum class ReferenceKind { linear_advection, burgers_riemann, burgers_rarefaction };

std::string to_string(ReferenceKind kind);

/// Exact entropy solution of the deterministic problem.
class ReferenceSolution {
public:
    /// u(x, t) = u0(x - c t) on the torus. `kinks` lists the non-smooth points of u0 in 1D.
    static ReferenceSolution linear_advection(int dim, std::vector<double> velocity, InitialData u0,
                                              std::vector<double> kinks = {});
    /// Periodic Burgers data: u_l on [0, x0), u_r on [x0, 1). Waves start at x0 and at 0;
    /// valid until they meet (interaction_time).
    static ReferenceSolution burgers_riemann(double ul, double ur, double x0);

    ReferenceKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double interaction_time() const { return t_star_; }
    /// Throws ConfigError for t < 0 or t past the interaction time.
    double operator()(const Point& x, double t) const;
    /// Points of [0, 1) where u(., t) is not smooth (1D only).
    std::vector<double> kinks(double t) const;
    InitialData initial() const;

private:
    ReferenceKind kind_ = ReferenceKind::linear_advection;
    int dim_ = 1;
    std::vector<double> velocity_;
    InitialData u0_;
    std::vector<double> kinks0_;
    double ul_ = 0.0, ur_ = 0.0, x0_ = 0.5;
    double t_star_ = std::numeric_limits<double>::infinity();
};

double exact_solution(const ReferenceSolution& ref, const Point& x, double t);

struct ErrorNorms {
    double l1 = 0.0;
    double l2 = 0.0;
};

/// ‖v_h - u(., t)‖ in L¹ and L² with the cell-constant v_h, integrated piecewise between kinks.
ErrorNorms reference_errors(const TorusGrid& grid, std::span<const double> values, const ReferenceSolution& ref,
                            double t, std::size_t quad_order = 8);

struct ConvergenceRow {
    std::size_t level = 0;
    std::size_t m = 0;
    double h = 0.0;
    double dt = 0.0;
    std::size_t M = 1;
    double p = 1.0;
    double error = 0.0;
    double stderr_ = 0.0;
    double order = std::numeric_limits<double>::quiet_NaN();  ///< log2(e_prev / e), NaN on the first row
    double l2_error = std::numeric_limits<double>::quiet_NaN();
    double l2_order = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    bool strictly_decreasing() const;
    double min_order() const;
};

/// Fills the order columns from consecutive errors.
void fill_orders(ConvergenceTable& table);

struct DeterministicStudy {
    FluxFunction flux;
    MonotoneFaceFlux numerical_flux;
    ReferenceSolution reference;
    double T = 0.3;
    double theta = 0.5;
    std::size_t init_quad_order = 8;
    unsigned threads = 1;
};

/// Zero-noise errors at T against the reference solution, one row per m.
ConvergenceTable deterministic_convergence(const DeterministicStudy& study, const std::vector<std::size_t>& m_list);

/// Classical upwind scheme for u_t + c·∇u = 0 on the same grid, written out directly.
std::vector<double> upwind_reference(const TorusGrid& grid, const std::vector<double>& velocity,
                                     std::vector<double> v0, const TimeGrid& time);

struct EnsembleConfig {
    std::size_t M = 100;
    std::uint64_t master_seed = 1;
    unsigned threads = 0;
    double theta = 0.5;
    bool shared_seed = false;  ///< every path uses the master seed itself
};

struct PathResult {
    std::uint64_t seed = 0;
    DiagnosticsReport report;
    std::vector<double> final_state;
};

struct EnsembleResult {
    std::vector<PathResult> paths;
    std::array<Estimate, 4> lp_final{};  ///< E‖v(T)‖_p^p for p in kMomentPowers
    EnergyIdentityReport energy;
    TightnessReport tightness;
    Estimate space, time_flat, time_full, closeness;
    double space_bound = 0.0, time_flat_bound = 0.0, time_full_bound = 0.0, closeness_bound = 0.0;
    std::size_t control_failures = 0;  ///< paths where a pathwise control fails
    Estimate max_energy_residual;
};

/// M independent paths with seeds derive_seed(master, i); statistics reduced in path order.
EnsembleResult mc_ensemble(const Scheme& scheme, const std::vector<double>& v0, const TimeGrid& time,
                           const EnsembleConfig& config);

struct CoupledStudyConfig {
    std::vector<std::size_t> levels{8, 16, 32, 64};
    std::size_t M = 64;
    double p = 1.0;
    double T = 0.25;
    double theta = 0.5;
    std::uint64_t master_seed = 1;
    unsigned threads = 0;
    std::size_t init_quad_order = 4;
};

struct CoupledStudy {
    /// Row i compares levels i and i+1: E‖v_{h_i} - v_{h_{i+1}}‖^p in L^p(𝕋^N × (0, T)).
    ConvergenceTable table;
    std::vector<std::vector<double>> path_errors;  ///< [row][path]
    /// Paired differences of consecutive rows exceed `k` standard errors.
    bool decreasing_within_ci(double k = 2.0) const;
};

/// Self-convergence on shared Brownian paths: the finest level draws keyed increments,
/// coarser levels aggregate them with couple_time_refinement.
CoupledStudy coupled_refinement_study(int dim, const FluxFunction& flux, const MonotoneFaceFlux& numerical_flux,
                                      const NoiseModel& noise, const InitialData& u0, const CoupledStudyConfig& config);

/// Space-time error ∫∫|v_c - v_f|^p between two full histories on nested levels (time steps in ratio 2).
double coupled_error(const Refinement& refinement, const Trajectory& coarse, const Trajectory& fine, double p);

}  // namespace stofv
