#pragma once

#include "stofv/mesh.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace stofv {

/// Physical flux A : R -> R^N, stored component-wise.
struct FluxFunction {
    std::string name;
    int dim = 1;
    std::array<std::function<double(double)>, 2> component;   ///< A_d
    std::array<std::function<double(double)>, 2> derivative;  ///< a_d = A_d'
    /// Roots of a_d on the working range. Only meaningful when `sonic_points_known`.
    std::array<std::vector<double>, 2> sonic_points;
    bool sonic_points_known = true;
    /// Declared Lipschitz constant L_A (used by the CFL restriction).
    double lipschitz = 1.0;
    double range_lo = -1.25;
    double range_hi = 1.25;
    /// Parameters needed to rebuild a built-in flux from configuration.
    std::vector<double> params;
};

/// A(u) = u^2/2 on every axis.
FluxFunction burgers_flux(int dim);
/// A(u) = c u with velocity vector c (size = dim).
FluxFunction linear_flux(const std::vector<double>& velocity);
/// A(u) = u^3/3 on every axis.
FluxFunction cubic_flux(int dim);
/// Built-in flux by name ("burgers", "linear", "cubic").
FluxFunction make_flux(const std::string& name, int dim, const std::vector<double>& params = {});

/// max |A_d'| over `samples` points of the working range, over all axes.
double sampled_lipschitz(const FluxFunction& flux, int samples = 2001);
/// Throws ConfigError if the declared L_A under-estimates the sampled one by 5% or more,
/// or if A(0) != 0.
void check_flux(const FluxFunction& flux);

/// Scalar flux g(ξ) = A(ξ)·n for n = sign * e_axis.
class NormalFlux {
public:
    NormalFlux(const FluxFunction& flux, int axis, int sign);

    double value(double xi) const { return sign_ * component_(xi); }
    double derivative(double xi) const { return sign_ * derivative_(xi); }

    /// Critical points of g lying strictly inside (lo, hi), sorted.
    std::vector<double> critical_points(double lo, double hi) const;
    /// min (or max) of g over [lo, hi].
    double extremum(double lo, double hi, bool maximize) const;
    /// Extremum of g over the candidates {critical points in (lo,hi)} plus optionally lo / hi.
    double extremum_over(double lo, double hi, bool maximize, bool with_lo, bool with_hi) const;
    /// Points of (lo, hi) where g crosses `level`, found on monotone pieces by bisection.
    std::vector<double> level_crossings(double lo, double hi, double level) const;

    int axis() const { return axis_; }
    int sign() const { return sign_; }

private:
    std::function<double(double)> component_;
    std::function<double(double)> derivative_;
    std::vector<double> critical_;
    int axis_;
    int sign_;
};

enum class FluxScheme { godunov, rusanov, engquist_osher, custom };

/// Monotone two-point numerical flux, per unit face area.
struct MonotoneFaceFlux {
    FluxScheme kind = FluxScheme::godunov;
    /// Rusanov viscosity λ; a non-positive value means "use the flux's L_A".
    double viscosity = 0.0;
    /// Custom per-unit-area oriented flux F(v, w, axis, sign). Partials by central differences.
    std::function<double(double, double, int, int)> custom;

    std::string name() const;
};

MonotoneFaceFlux make_face_flux(const std::string& name, double viscosity = 0.0);

/// The numerical flux of one face orientation, A_{K->L}/|K|L|, with its partial derivatives.
class OrientedFaceFlux {
public:
    OrientedFaceFlux(const MonotoneFaceFlux& scheme, const FluxFunction& flux, int axis, int sign);

    double value(double v, double w) const;
    /// ∂_1 with the left-limit convention at ties.
    double d1(double v, double w) const;
    /// ∂_2 with the right-limit convention at ties.
    double d2(double v, double w) const;
    /// a(ξ)·n, the per-unit-area kinetic speed a^*_{K->L}/|K|L|.
    double astar(double xi) const { return normal_.derivative(xi); }
    /// Points of (min(v,w), max(v,w)) where ξ -> ∂_2 F(v, ξ) or ξ -> ∂_1 F(ξ, w) may jump.
    std::vector<double> kinks(double v, double w) const;

    const NormalFlux& normal() const { return normal_; }
    FluxScheme kind() const { return scheme_.kind; }
    double viscosity() const { return lambda_; }

private:
    double eo_positive(double x) const;
    double eo_negative(double x) const;

    MonotoneFaceFlux scheme_;
    NormalFlux normal_;
    double lambda_;
};

/// Godunov flux per unit area for orientation sign * e_axis.
double godunov(const FluxFunction& flux, double v, double w, int axis, int sign);

/// Q_{K->L} = |K|L| F(v_K, v_L) with the face's orientation.
double face_flux(const MonotoneFaceFlux& scheme, const FluxFunction& flux, const Face& face, double v_K,
                 double v_L, const TorusGrid& grid);

/// Worst-case axiom residuals of a numerical flux over a sample grid.
struct AxiomReport {
    double monotony_violation = 0.0;   ///< max over samples of the wrong-sign increment
    double lipschitz_observed = 0.0;   ///< max difference quotient
    double lipschitz_bound = 0.0;
    double consistency_residual = 0.0; ///< max |F(v,v) - A(v)·n|
    double symmetry_residual = 0.0;    ///< max |F_{K->L}(v,w) + F_{L->K}(w,v)|
    double tolerance = 1e-10;

    bool monotony_ok() const { return monotony_violation <= tolerance; }
    bool lipschitz_ok() const { return lipschitz_observed <= lipschitz_bound * (1.0 + tolerance) + tolerance; }
    bool consistency_ok() const { return consistency_residual <= tolerance; }
    bool symmetry_ok() const { return symmetry_residual <= tolerance; }
    bool passed() const { return monotony_ok() && lipschitz_ok() && consistency_ok() && symmetry_ok(); }
};

AxiomReport validate_flux(const MonotoneFaceFlux& scheme, const FluxFunction& flux, double lo, double hi,
                          int samples, double tolerance = 1e-10);

}  // namespace stofv
