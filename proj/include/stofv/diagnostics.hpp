#pragma once

#include "stofv/kinetic.hpp"
#include "stofv/scheme.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace stofv {

/// Exponents reported for L^p norms and moments.
inline constexpr std::array<double, 4> kMomentPowers{1.0, 2.0, 4.0, 6.0};

/// Everything measured on one step. Norms are ‖·‖² = Σ|K| v².
struct StepDiagnostics {
    std::size_t n = 0;
    double t = 0.0;
    double dt = 0.0;
    double half_energy_pre = 0.0;   ///< ½‖v^n‖²
    double half_energy_half = 0.0;  ///< ½‖v^{n+1/2}‖²
    double half_energy_post = 0.0;  ///< ½‖v^{n+1}‖²
    double dissipation = 0.0;       ///< Δt Σ|K| ∫ m
    double noise_input = 0.0;       ///< ½ Δt Σ|K| G²_K(v^n)
    double energy_residual = 0.0;   ///< ½‖v^{n+1/2}‖² + dissipation - ½‖v^n‖²
    double mass_residual = 0.0;     ///< |Σ|K|(v^{n+1/2} - v^n)| / Σ|K||v^n|
    double min_m = 0.0;             ///< min of m over nodes and breakpoints
    double outside_m = 0.0;         ///< max |m| at 0.05 outside the envelopes (closed form)
    std::array<double, 2> lp_residual{};  ///< p = 2, 4, relative to ‖v^n‖_p^p
    double space_phi = 0.0;         ///< Σ_K Σ_L ∫(f̄_L - f̄_K)Φ
    double space_phibar = 0.0;      ///< Σ_K Σ_L ∫(f_L - f_K)Φ̄
    double control_fbar = 0.0;      ///< Σ|K| ∫ f̄^n_K m
    double control_f = 0.0;         ///< Σ|K| ∫ f^n_K m
    double flat_plus = 0.0;         ///< ‖[v^{n+1/2} - v^n]_+‖²
    double flat_minus = 0.0;        ///< ‖[v^{n+1/2} - v^n]_-‖²
    double full_increment = 0.0;    ///< ‖v^{n+1} - v^n‖²
    double noise_realized = 0.0;    ///< ½‖v^{n+1} - v^{n+1/2}‖²
    double closeness = 0.0;         ///< E[∫_{t_n}^{t_{n+1}} ‖v^♯ - v^n‖² dt | step data], bridge integrated exactly
    double split_residual = 0.0;    ///< ½‖[v^{n+1/2}-v^n]_+‖² + Δt control_fbar - ½ Δt space_phi
    std::array<double, 4> lp_pre{};       ///< ‖v^n‖_p^p for kMomentPowers
    std::array<double, 4> nu_mid{};       ///< ν^δ moment at t_n + Δt/2
    std::array<double, 4> m_moment{};     ///< Δt Σ|K| ∫ (1+|ξ|^p) m
    std::array<double, 4> lp_post{};      ///< ‖v^{n+1}‖_p^p
};

/// Diagnostics of one step; `seed` keys the bridge used for the mid-step ν^δ moment.
StepDiagnostics diagnose_step(const KineticScheme& kin, const StepRecord& record, std::uint64_t seed);

/// Path totals and bounds.
struct DiagnosticsReport {
    double theta = 0.5;
    double D0 = 0.0;
    double T = 0.0;
    double max_dt = 0.0;
    double initial_norm2 = 0.0;  ///< ‖v_δ(0)‖²
    double final_half_energy = 0.0;
    double total_dissipation = 0.0;  ///< ℰ(T)
    double total_noise_input = 0.0;
    double total_noise_realized = 0.0;
    double max_energy_residual = 0.0;
    double max_mass_residual = 0.0;
    double min_m = 0.0;
    double max_outside_m = 0.0;
    double max_lp_residual = 0.0;
    double max_split_residual = 0.0;
    double space_sum = 0.0;       ///< Σ Δt Σ Σ ∫[(f̄_L-f̄_K)Φ + (f_L-f_K)Φ̄]
    double space_phi_sum = 0.0;   ///< Σ Δt Σ Σ ∫(f̄_L-f̄_K)Φ
    double space_phibar_sum = 0.0;
    double control_fbar_sum = 0.0;  ///< Σ Δt Σ|K| ∫ f̄ m
    double control_f_sum = 0.0;
    double time_flat_sum = 0.0;     ///< Σ ‖v^♭(t_{n+1}) - v(t_n)‖²
    double time_flat_plus_sum = 0.0;
    double time_flat_minus_sum = 0.0;
    double time_full_sum = 0.0;     ///< Σ ‖v(t_{n+1}) - v(t_n)‖²
    double closeness = 0.0;         ///< Σ_n closeness
    std::array<double, 4> sup_nu_moment{};  ///< sup over {t_n, t_n + Δt/2} of ∫∫(1+|ξ|^p)dν
    std::array<double, 4> m_moment{};       ///< ∫∫∫ (1+|ξ|^p) dm_δ
    std::array<double, 4> lp_final{};
    std::vector<StepDiagnostics> steps;

    double space_bound() const;       ///< θ^{-1}‖v0‖² + D0 T/θ
    double time_flat_bound() const;   ///< θ^{-1}‖v0‖² + D0 T/θ
    double time_full_bound() const;   ///< θ^{-1}‖v0‖² + 2 D0 T/θ
    double closeness_bound() const;   ///< [θ^{-1}‖v0‖² + D0 T(1+θ^{-1})] max Δt
    /// Pathwise controls: Σ Δt Σ Σ ∫(f̄_L-f̄_K)Φ <= (2/θ) control_fbar_sum, and the barred version.
    bool control_space_holds(double slack = 1e-12) const;
    bool control_space_bar_holds(double slack = 1e-12) const;
    bool control_time_holds(double slack = 1e-12) const;
    bool control_time_bar_holds(double slack = 1e-12) const;
};

/// Incremental construction of a report from step diagnostics.
class DiagnosticsAccumulator {
public:
    DiagnosticsAccumulator(double theta, double D0, double T, std::span<const double> v0, double cell_volume,
                           bool keep_steps);
    void add(const StepDiagnostics& s);
    DiagnosticsReport finish() const;

private:
    DiagnosticsReport report_;
    bool keep_steps_;
};

/// Runs the scheme and diagnoses every step.
DiagnosticsReport diagnose_run(const Scheme& scheme, const std::vector<double>& v0, const TimeGrid& time,
                               const IncrementSource& increments, std::uint64_t seed, double theta,
                               bool keep_steps = true);
/// Diagnoses a trajectory whose step records were kept.
DiagnosticsReport diagnose_trajectory(const Scheme& scheme, const Trajectory& tr, double theta,
                                      bool keep_steps = true);

/// Per-step energy residuals ½‖v^{n+1/2}‖² + Δt Σ|K|∫m - ½‖v^n‖².
std::vector<double> energy_balance_path(const Scheme& scheme, const Trajectory& tr);

/// Weak-BV sums of one path and their bounds.
struct WeakBVSums {
    double space = 0.0;
    double time_flat = 0.0;
    double time_full = 0.0;
    double time_flat_plus = 0.0;
    double time_flat_minus = 0.0;
    double space_bound = 0.0;
    double time_flat_bound = 0.0;
    double time_full_bound = 0.0;
};
WeakBVSums weak_bv_sums(const DiagnosticsReport& report);

/// Mean and standard error.
struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t count = 0;
};
Estimate estimate(std::span<const double> samples);

/// Comparison of E[lhs] and E[rhs] through the paired differences.
struct IdentityCheck {
    Estimate lhs;
    Estimate rhs;
    Estimate difference;
    /// |mean difference| <= k standard errors (or <= abs_tol when the difference is degenerate).
    bool within(double k = 3.0, double abs_tol = 1e-8) const;
};

/// Energy identity in expectation over an ensemble of reports:
/// E½‖v(T)‖² + Eℰ(T) against ½‖v(0)‖² + ½E Σ Δt Σ|K| G²_K, and the per-step noise-energy identity.
struct EnergyIdentityReport {
    IdentityCheck total;
    IdentityCheck noise_energy;
};
EnergyIdentityReport energy_identity_mc(std::span<const DiagnosticsReport> paths);

/// Ensemble statistics of the moment quantities.
struct TightnessReport {
    std::array<Estimate, 4> sup_nu_moment;  ///< E sup_t ∫∫(1+|ξ|^p) dν
    std::array<Estimate, 4> m_moment_sq;    ///< E |∫∫∫(1+|ξ|^p) dm_δ|²
};
TightnessReport tightness_moments(std::span<const DiagnosticsReport> paths);

/// JSON rendering of a report (steps omitted unless `with_steps`).
std::string report_json(const DiagnosticsReport& report, bool with_steps = false);

}  // namespace stofv
