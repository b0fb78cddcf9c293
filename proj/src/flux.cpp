#include "stofv/flux.hpp"

#include "stofv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stofv {

namespace {

constexpr double kWorkingMargin = 0.25;

FluxFunction base_flux(std::string name, int dim) {
    if (dim != 1 && dim != 2) {
        throw ConfigError("flux: dim must be 1 or 2");
    }
    FluxFunction f;
    f.name = std::move(name);
    f.dim = dim;
    f.range_lo = -1.0 - kWorkingMargin;
    f.range_hi = 1.0 + kWorkingMargin;
    return f;
}

// Roots of a sampled derivative on [lo, hi], refined by bisection.
std::vector<double> scan_roots(const std::function<double(double)>& d, double lo, double hi, int samples) {
    std::vector<double> roots;
    double x0 = lo;
    double f0 = d(x0);
    for (int i = 1; i <= samples; ++i) {
        const double x1 = lo + (hi - lo) * i / samples;
        const double f1 = d(x1);
        if (f0 == 0.0) {
            roots.push_back(x0);
        } else if (f0 * f1 < 0.0) {
            double a = x0;
            double b = x1;
            double fa = f0;
            for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
                const double c = 0.5 * (a + b);
                const double fc = d(c);
                if (fa * fc <= 0.0) {
                    b = c;
                } else {
                    a = c;
                    fa = fc;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

}  // namespace

FluxFunction burgers_flux(int dim) {
    FluxFunction f = base_flux("burgers", dim);
    for (int d = 0; d < dim; ++d) {
        f.component[d] = [](double u) { return 0.5 * u * u; };
        f.derivative[d] = [](double u) { return u; };
        f.sonic_points[d] = {0.0};
    }
    f.lipschitz = f.range_hi;
    return f;
}

FluxFunction linear_flux(const std::vector<double>& velocity) {
    FluxFunction f = base_flux("linear", static_cast<int>(velocity.size()));
    double lip = 0.0;
    for (int d = 0; d < f.dim; ++d) {
        const double c = velocity[d];
        f.component[d] = [c](double u) { return c * u; };
        f.derivative[d] = [c](double) { return c; };
        lip = std::max(lip, std::abs(c));
    }
    f.lipschitz = lip;
    f.params = velocity;
    return f;
}

FluxFunction cubic_flux(int dim) {
    FluxFunction f = base_flux("cubic", dim);
    for (int d = 0; d < dim; ++d) {
        f.component[d] = [](double u) { return u * u * u / 3.0; };
        f.derivative[d] = [](double u) { return u * u; };
        // u^2 has a double root: no sign change, no interior extremum.
        f.sonic_points[d] = {};
    }
    f.lipschitz = f.range_hi * f.range_hi;
    return f;
}

FluxFunction make_flux(const std::string& name, int dim, const std::vector<double>& params) {
    if (name == "burgers") {
        return burgers_flux(dim);
    }
    if (name == "cubic") {
        return cubic_flux(dim);
    }
    if (name == "linear") {
        std::vector<double> c = params;
        if (c.empty()) {
            c.assign(static_cast<std::size_t>(dim), 1.0);
        }
        if (static_cast<int>(c.size()) != dim) {
            throw ConfigError("flux: linear velocity must have dim components");
        }
        return linear_flux(c);
    }
    throw ConfigError("flux: unknown flux '" + name + "'");
}

double sampled_lipschitz(const FluxFunction& flux, int samples) {
    double lip = 0.0;
    for (int d = 0; d < flux.dim; ++d) {
        for (int i = 0; i <= samples; ++i) {
            const double u = flux.range_lo + (flux.range_hi - flux.range_lo) * i / samples;
            lip = std::max(lip, std::abs(flux.derivative[d](u)));
        }
    }
    return lip;
}

void check_flux(const FluxFunction& flux) {
    for (int d = 0; d < flux.dim; ++d) {
        if (std::abs(flux.component[d](0.0)) > 1e-14) {
            throw ConfigError("flux: A(0) must vanish");
        }
    }
    const double sampled = sampled_lipschitz(flux);
    if (flux.lipschitz < 0.95 * sampled) {
        throw ConfigError("flux: declared L_A=" + std::to_string(flux.lipschitz) +
                          " under-estimates sampled Lip(A)=" + std::to_string(sampled));
    }
}

// ---------------------------------------------------------------------------

NormalFlux::NormalFlux(const FluxFunction& flux, int axis, int sign)
    : component_(flux.component.at(static_cast<std::size_t>(axis))),
      derivative_(flux.derivative.at(static_cast<std::size_t>(axis))),
      axis_(axis),
      sign_(sign) {
    if (flux.sonic_points_known) {
        critical_ = flux.sonic_points[static_cast<std::size_t>(axis)];
    } else {
        critical_ = scan_roots(derivative_, flux.range_lo, flux.range_hi, 4096);
        if (critical_.size() > 512) {
            throw ConfigError("flux: derivative too oscillatory to resolve extrema");
        }
    }
    std::sort(critical_.begin(), critical_.end());
}

std::vector<double> NormalFlux::critical_points(double lo, double hi) const {
    std::vector<double> out;
    for (double c : critical_) {
        if (c > lo && c < hi) {
            out.push_back(c);
        }
    }
    return out;
}

double NormalFlux::extremum_over(double lo, double hi, bool maximize, bool with_lo, bool with_hi) const {
    double best = maximize ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    auto take = [&](double x) {
        const double g = value(x);
        best = maximize ? std::max(best, g) : std::min(best, g);
    };
    if (with_lo) {
        take(lo);
    }
    if (with_hi) {
        take(hi);
    }
    for (double c : critical_) {
        if (c > lo && c < hi) {
            take(c);
        }
    }
    return best;
}

double NormalFlux::extremum(double lo, double hi, bool maximize) const {
    return extremum_over(lo, hi, maximize, true, true);
}

std::vector<double> NormalFlux::level_crossings(double lo, double hi, double level) const {
    std::vector<double> out;
    if (!(hi > lo)) {
        return out;
    }
    std::vector<double> pts{lo};
    for (double c : critical_points(lo, hi)) {
        pts.push_back(c);
    }
    pts.push_back(hi);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double a = pts[i];
        double b = pts[i + 1];
        double fa = value(a) - level;
        const double fb = value(b) - level;
        if (!(fa * fb < 0.0)) {
            continue;
        }
        for (int it = 0; it < 200 && b - a > 4e-16 * std::max(1.0, std::abs(a)); ++it) {
            const double c = 0.5 * (a + b);
            const double fc = value(c) - level;
            if (fa * fc <= 0.0) {
                b = c;
            } else {
                a = c;
                fa = fc;
            }
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string MonotoneFaceFlux::name() const {
    switch (kind) {
        case FluxScheme::godunov: return "godunov";
        case FluxScheme::rusanov: return "rusanov";
        case FluxScheme::engquist_osher: return "engquist_osher";
        case FluxScheme::custom: return "custom";
    }
    return "unknown";
}

MonotoneFaceFlux make_face_flux(const std::string& name, double viscosity) {
    MonotoneFaceFlux nf;
    if (name == "godunov") {
        nf.kind = FluxScheme::godunov;
    } else if (name == "rusanov") {
        nf.kind = FluxScheme::rusanov;
    } else if (name == "engquist_osher" || name == "eo") {
        nf.kind = FluxScheme::engquist_osher;
    } else {
        throw ConfigError("numerical flux: unknown scheme '" + name + "'");
    }
    nf.viscosity = viscosity;
    return nf;
}

OrientedFaceFlux::OrientedFaceFlux(const MonotoneFaceFlux& scheme, const FluxFunction& flux, int axis, int sign)
    : scheme_(scheme), normal_(flux, axis, sign), lambda_(scheme.viscosity > 0.0 ? scheme.viscosity : flux.lipschitz) {
    if (scheme.kind == FluxScheme::custom && !scheme.custom) {
        throw ConfigError("numerical flux: custom scheme without a callable");
    }
}

// ∫_0^x max(g',0), exact through the monotone pieces of g.
double OrientedFaceFlux::eo_positive(double x) const {
    const double lo = std::min(0.0, x);
    const double hi = std::max(0.0, x);
    std::vector<double> pts{lo};
    for (double c : normal_.critical_points(lo, hi)) {
        pts.push_back(c);
    }
    pts.push_back(hi);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        s += std::max(normal_.value(pts[i + 1]) - normal_.value(pts[i]), 0.0);
    }
    return x >= 0.0 ? s : -s;
}

double OrientedFaceFlux::eo_negative(double x) const {
    const double lo = std::min(0.0, x);
    const double hi = std::max(0.0, x);
    std::vector<double> pts{lo};
    for (double c : normal_.critical_points(lo, hi)) {
        pts.push_back(c);
    }
    pts.push_back(hi);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        s += std::min(normal_.value(pts[i + 1]) - normal_.value(pts[i]), 0.0);
    }
    return x >= 0.0 ? s : -s;
}

double OrientedFaceFlux::value(double v, double w) const {
    switch (scheme_.kind) {
        case FluxScheme::godunov:
            return v <= w ? normal_.extremum(v, w, false) : normal_.extremum(w, v, true);
        case FluxScheme::rusanov:
            return 0.5 * (normal_.value(v) + normal_.value(w)) - 0.5 * lambda_ * (w - v);
        case FluxScheme::engquist_osher:
            return normal_.value(0.0) + eo_positive(v) + eo_negative(w);
        case FluxScheme::custom:
            return scheme_.custom(v, w, normal_.axis(), normal_.sign());
    }
    return 0.0;
}

double OrientedFaceFlux::d1(double v, double w) const {
    switch (scheme_.kind) {
        case FluxScheme::godunov: {
            const double gv = normal_.value(v);
            const double dv = normal_.derivative(v);
            if (v < w) {
                const double other = normal_.extremum_over(v, w, false, false, true);
                if (gv < other) return dv;
                if (gv == other) return std::max(dv, 0.0);
                return 0.0;
            }
            if (v > w) {
                const double other = normal_.extremum_over(w, v, true, true, false);
                return gv > other ? dv : 0.0;
            }
            return std::max(dv, 0.0);
        }
        case FluxScheme::rusanov:
            return 0.5 * (normal_.derivative(v) + lambda_);
        case FluxScheme::engquist_osher:
            return std::max(normal_.derivative(v), 0.0);
        case FluxScheme::custom: {
            constexpr double eps = 1e-6;
            const double fd = (value(v + eps, w) - value(v - eps, w)) / (2.0 * eps);
            return std::max(fd, 0.0);
        }
    }
    return 0.0;
}

double OrientedFaceFlux::d2(double v, double w) const {
    switch (scheme_.kind) {
        case FluxScheme::godunov: {
            const double gw = normal_.value(w);
            const double dw = normal_.derivative(w);
            if (v < w) {
                const double other = normal_.extremum_over(v, w, false, true, false);
                if (gw < other) return dw;
                if (gw == other) return std::min(dw, 0.0);
                return 0.0;
            }
            if (v > w) {
                const double other = normal_.extremum_over(w, v, true, false, true);
                return gw > other ? dw : 0.0;
            }
            return std::min(dw, 0.0);
        }
        case FluxScheme::rusanov:
            return 0.5 * (normal_.derivative(w) - lambda_);
        case FluxScheme::engquist_osher:
            return std::min(normal_.derivative(w), 0.0);
        case FluxScheme::custom: {
            constexpr double eps = 1e-6;
            const double fd = (value(v, w + eps) - value(v, w - eps)) / (2.0 * eps);
            return std::min(fd, 0.0);
        }
    }
    return 0.0;
}

std::vector<double> OrientedFaceFlux::kinks(double v, double w) const {
    const double lo = std::min(v, w);
    const double hi = std::max(v, w);
    std::vector<double> out = normal_.critical_points(lo, hi);
    if (scheme_.kind != FluxScheme::godunov || !(hi > lo)) {
        return out;
    }
    std::vector<double> levels{normal_.value(v), normal_.value(w)};
    for (double c : out) {
        levels.push_back(normal_.value(c));
    }
    for (double level : levels) {
        for (double x : normal_.level_crossings(lo, hi, level)) {
            out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------

double godunov(const FluxFunction& flux, double v, double w, int axis, int sign) {
    return OrientedFaceFlux(MonotoneFaceFlux{}, flux, axis, sign).value(v, w);
}

double face_flux(const MonotoneFaceFlux& scheme, const FluxFunction& flux, const Face& face, double v_K,
                 double v_L, const TorusGrid& grid) {
    return grid.face_area() * OrientedFaceFlux(scheme, flux, face.axis, face.sign).value(v_K, v_L);
}

AxiomReport validate_flux(const MonotoneFaceFlux& scheme, const FluxFunction& flux, double lo, double hi,
                          int samples, double tolerance) {
    if (samples < 2) {
        throw ConfigError("validate_flux: samples must be >= 2");
    }
    AxiomReport rep;
    rep.tolerance = tolerance;
    const double lambda = scheme.viscosity > 0.0 ? scheme.viscosity : flux.lipschitz;
    double lip = flux.lipschitz;
    for (int axis = 0; axis < flux.dim; ++axis) {
        for (int i = 0; i <= 2000; ++i) {
            const double x = lo + (hi - lo) * i / 2000.0;
            lip = std::max(lip, std::abs(flux.derivative[static_cast<std::size_t>(axis)](x)));
        }
    }
    rep.lipschitz_bound = scheme.kind == FluxScheme::rusanov ? lip + 0.5 * lambda : lip;

    std::vector<double> grid(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (samples - 1);
    }
    const double step = grid[1] - grid[0];

    for (int axis = 0; axis < flux.dim; ++axis) {
        for (int sign : {-1, 1}) {
            const OrientedFaceFlux F(scheme, flux, axis, sign);
            const OrientedFaceFlux R(scheme, flux, axis, -sign);
            std::vector<double> table(grid.size() * grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) {
                for (std::size_t j = 0; j < grid.size(); ++j) {
                    table[i * grid.size() + j] = F.value(grid[i], grid[j]);
                    rep.symmetry_residual =
                        std::max(rep.symmetry_residual, std::abs(table[i * grid.size() + j] + R.value(grid[j], grid[i])));
                }
                const double a = sign * flux.component[static_cast<std::size_t>(axis)](grid[i]);
                rep.consistency_residual = std::max(rep.consistency_residual, std::abs(table[i * grid.size() + i] - a));
            }
            for (std::size_t i = 0; i < grid.size(); ++i) {
                for (std::size_t j = 0; j < grid.size(); ++j) {
                    const double f = table[i * grid.size() + j];
                    if (i + 1 < grid.size()) {
                        const double df = table[(i + 1) * grid.size() + j] - f;  // nondecreasing in v
                        rep.monotony_violation = std::max(rep.monotony_violation, -df);
                        rep.lipschitz_observed = std::max(rep.lipschitz_observed, std::abs(df) / step);
                    }
                    if (j + 1 < grid.size()) {
                        const double df = table[i * grid.size() + j + 1] - f;  // nonincreasing in w
                        rep.monotony_violation = std::max(rep.monotony_violation, df);
                        rep.lipschitz_observed = std::max(rep.lipschitz_observed, std::abs(df) / step);
                    }
                }
            }
        }
    }
    return rep;
}

}  // namespace stofv
