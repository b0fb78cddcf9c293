#pragma once

#include "stofv/flux.hpp"
#include "stofv/scheme.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace stofv {

/// Kinetic quantities of one oriented face, all multiplied by the face area |K|L|.
class KineticFace {
public:
    KineticFace(const OrientedFaceFlux& flux, double area) : flux_(&flux), area_(area) {}

    /// a_{K->L}(ξ, v, w).
    double a(double xi, double v, double w) const;
    /// a^*_{K->L}(ξ) = |K|L| a(ξ)·n.
    double astar(double xi) const { return area_ * flux_->astar(xi); }
    /// ā = a^* - a, by definition.
    double abar(double xi, double v, double w) const { return astar(xi) - a(xi, v, w); }
    /// ā from its explicit piecewise formula.
    double abar_explicit(double xi, double v, double w) const;
    /// b̄(ζ, ξ, v, w), whose ζ-integral up to ξ is Φ̄.
    double bbar(double zeta, double xi, double v, double w) const;

    /// |K|L| A_{K->L}(v, w).
    double numerical_flux(double v, double w) const { return area_ * flux_->value(v, w); }
    /// Φ = A_{K->L}(v,w) - A_{K->L}(v∧ξ, w∧ξ).
    double Phi(double xi, double v, double w) const;
    /// Φ̄ = A_{K->L}(ξ,ξ) - A_{K->L}(v∧ξ, w∧ξ).
    double Phibar(double xi, double v, double w) const;
    /// Φ as ∫_ξ^∞ a(ζ) dζ.
    double Phi_quadrature(double xi, double v, double w) const;
    /// Φ̄ as ∫_{-∞}^ξ ā(ζ) dζ.
    double Phibar_quadrature(double xi, double v, double w) const;
    /// Φ̄ as ∫_{-∞}^ξ b̄(ζ, ξ) dζ.
    double Phibar_bbar_quadrature(double xi, double v, double w) const;

    /// v, w, and every point of (v∧w, v∨w) where ξ -> a(ξ,v,w) or Φ(ξ,v,w) may lose smoothness.
    std::vector<double> breakpoints(double v, double w) const;

    /// ∫ (f̄_L - f̄_K) Φ(ξ, v_K, v_L) dξ, with f̄_K = 1_{ξ >= v_K}.
    double weak_bv(double v_K, double v_L) const;
    /// ∫ (f_L - f_K) Φ̄(ξ, v_K, v_L) dξ, with f_K = 1_{v_K > ξ}.
    double weak_bv_bar(double v_K, double v_L) const;

    const OrientedFaceFlux& flux() const { return *flux_; }
    double area() const { return area_; }

private:
    const OrientedFaceFlux* flux_;
    double area_;
};

/// Kinetic faces of a scheme; the scheme must outlive this object.
class KineticScheme {
public:
    explicit KineticScheme(const Scheme& scheme);

    const Scheme& scheme() const { return *scheme_; }
    const KineticFace& face(int axis, int sign) const;
    const KineticFace& face(const Face& f) const { return face(f.axis, f.sign); }

private:
    const Scheme* scheme_;
    std::vector<KineticFace> faces_;
};

/// Free-function forms.
double kinetic_a(const KineticFace& face, double xi, double v, double w);
double entropy_flux(const KineticFace& face, double xi, double v, double w);
double conj_entropy_flux(const KineticFace& face, double xi, double v, double w);

/// The dissipation density ξ -> m^n_K(ξ) of one cell and step, with breakpoint-aware quadrature.
class DissipationMeasure {
public:
    DissipationMeasure(const KineticScheme& kin, const StepRecord& record, std::size_t cell, std::size_t order = 5);

    std::size_t cell() const { return cell_; }
    std::size_t step() const { return step_; }
    /// Convex envelope of {v^{n+1/2}_K, v^n_K, v^n_L}.
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    /// m at the quadrature nodes.
    const std::vector<double>& values() const { return values_; }

    /// The closed-form expression, evaluated everywhere.
    double raw(double xi) const;
    /// raw(ξ) on the envelope, 0 outside it.
    double operator()(double xi) const;

    /// ∫ ψ(ξ) m(ξ) dξ on the stored nodes.
    double integrate(const std::function<double(double)>& psi) const;
    /// Same, re-split at additional breakpoints of ψ.
    double integrate(const std::function<double(double)>& psi, std::span<const double> extra) const;
    double mass() const;
    /// ∫ |ξ|^p m dξ.
    double moment(double p) const;
    /// ∫_{ξ >= v^n_K} m dξ and ∫_{ξ < v^n_K} m dξ.
    double mass_above_state() const;
    double mass_below_state() const;
    double min_value() const;

private:
    const KineticScheme* kin_;
    std::size_t cell_;
    std::size_t step_;
    double dt_;
    double volume_;
    double v_;
    double v_half_;
    std::vector<std::pair<const KineticFace*, double>> neighbors_;
    double lo_;
    double hi_;
    std::size_t order_;
    std::vector<double> breakpoints_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> values_;
};

DissipationMeasure dissipation(const KineticScheme& kin, const StepRecord& record, std::size_t cell);

/// Polynomial bump ψ(ξ) = (1 - ((ξ-c)/r)²)³ on [c-r, c+r].
struct TestFunction {
    double center = 0.0;
    double radius = 1.0;

    double operator()(double xi) const;
    double derivative(double xi) const;
    /// Ψ(s) = ∫_{-∞}^s ψ.
    double primitive(double s) const;
    double lo() const { return center - radius; }
    double hi() const { return center + radius; }
};

/// |K|(Ψ(v^{n+1/2}) - Ψ(v^n)) + Δt Σ_L ∫ a ψ + |K| Δt ∫ ψ' m.
double kinetic_residual(const KineticScheme& kin, const StepRecord& record, std::size_t cell, const TestFunction& psi);

/// Left side minus right side of the discrete kinetic equation at t = t_n + (J/S) Δt_n, with the
/// stochastic integral as a left-point sum over the dyadic bridge at S substeps.
double discrete_kinetic_residual(const KineticScheme& kin, const StepRecord& record, std::size_t cell,
                                 std::uint64_t seed, std::size_t J, std::size_t S, const TestFunction& psi);

/// ∫ (a(ξ,v,w) - a^*(ξ)1_{0>ξ}) dξ - |K|L| A_{K->L}(v, w).
double consistency_a1_residual(const KineticFace& face, double v, double w);
/// max over sampled ξ of |a(ξ,v,v) - a^*(ξ)1_{v>ξ}|.
double consistency_a2_residual(const KineticFace& face, double v, int samples = 64);
/// max over sampled ξ >= v∨w of |a(ξ,v,w)|.
double support_residual(const KineticFace& face, double v, double w, int samples = 64);
/// 2 L_A |K|L| ∫(f̄_L - f̄_K)Φ - |Φ(ξ∨v)|², nonnegative when the bound holds.
double phi_square_gap(const KineticFace& face, double lipschitz, double xi, double v, double w);

/// f_δ(x, t, ξ) on a trajectory with records.
double f_delta(const Trajectory& tr, const Scheme& scheme, const Point& x, double t, double xi);
/// ∫_T ∫ (1 + |ξ|^p) dν^δ_{x,t} dx.
double nu_moment(const Trajectory& tr, const Scheme& scheme, double t, double p);

}  // namespace stofv
