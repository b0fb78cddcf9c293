#include "stofv/kinetic.hpp"

#include "stofv/errors.hpp"
#include "stofv/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace stofv {

namespace {

std::vector<double> merged(std::vector<double> a, std::span<const double> b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

}  // namespace

double KineticFace::a(double xi, double v, double w) const {
    if (xi < std::min(v, w)) {
        return astar(xi);
    }
    if (v <= xi && xi < w) {
        return area_ * flux_->d2(v, xi);
    }
    if (w <= xi && xi < v) {
        return area_ * flux_->d1(xi, w);
    }
    return 0.0;
}

double KineticFace::abar_explicit(double xi, double v, double w) const {
    if (xi >= std::max(v, w)) {
        return astar(xi);
    }
    if (v <= xi && xi < w) {
        return astar(xi) - area_ * flux_->d2(v, xi);
    }
    if (w <= xi && xi < v) {
        return astar(xi) - area_ * flux_->d1(xi, w);
    }
    return 0.0;
}

double KineticFace::bbar(double zeta, double xi, double v, double w) const {
    if (zeta > xi) {
        return 0.0;
    }
    if (xi >= std::max(v, w)) {
        if (zeta > std::max(v, w)) {
            return astar(zeta);
        }
        if (v <= zeta && zeta <= w) {
            return area_ * flux_->d1(zeta, w);
        }
        if (w <= zeta && zeta <= v) {
            return area_ * flux_->d2(v, zeta);
        }
        return 0.0;
    }
    if (v <= xi && xi <= w) {
        return zeta >= v ? area_ * flux_->d1(zeta, xi) : 0.0;
    }
    if (w <= xi && xi <= v) {
        return zeta >= w ? area_ * flux_->d2(xi, zeta) : 0.0;
    }
    return 0.0;
}

double KineticFace::Phi(double xi, double v, double w) const {
    if (xi >= std::max(v, w)) {
        return 0.0;
    }
    return area_ * (flux_->value(v, w) - flux_->value(std::min(v, xi), std::min(w, xi)));
}

double KineticFace::Phibar(double xi, double v, double w) const {
    if (xi <= std::min(v, w)) {
        return 0.0;
    }
    return area_ * (flux_->value(xi, xi) - flux_->value(std::min(v, xi), std::min(w, xi)));
}

double KineticFace::Phi_quadrature(double xi, double v, double w) const {
    const double hi = std::max(v, w);
    if (xi >= hi) {
        return 0.0;
    }
    const auto bp = breakpoints(v, w);
    return integrate_piecewise([&](double z) { return a(z, v, w); }, xi, hi, bp);
}

double KineticFace::Phibar_quadrature(double xi, double v, double w) const {
    const double lo = std::min(v, w);
    if (xi <= lo) {
        return 0.0;
    }
    const auto bp = breakpoints(v, w);
    return integrate_piecewise([&](double z) { return abar(z, v, w); }, lo, xi, bp);
}

double KineticFace::Phibar_bbar_quadrature(double xi, double v, double w) const {
    const double lo = std::min(v, w);
    if (xi <= lo) {
        return 0.0;
    }
    std::vector<double> bp;
    if (xi >= std::max(v, w)) {
        bp = breakpoints(v, w);
    } else if (v <= xi) {
        bp = flux_->kinks(v, xi);
        bp.push_back(v);
    } else {
        bp = flux_->kinks(xi, w);
        bp.push_back(w);
    }
    return integrate_piecewise([&](double z) { return bbar(z, xi, v, w); }, lo, xi, bp);
}

std::vector<double> KineticFace::breakpoints(double v, double w) const {
    std::vector<double> bp = flux_->kinks(v, w);
    bp.push_back(v);
    bp.push_back(w);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

double KineticFace::weak_bv(double v_K, double v_L) const {
    if (v_K == v_L) {
        return 0.0;
    }
    const auto bp = breakpoints(v_K, v_L);
    return integrate_piecewise([&](double z) { return Phi(z, v_K, v_L); }, v_L, v_K, bp);
}

double KineticFace::weak_bv_bar(double v_K, double v_L) const {
    if (v_K == v_L) {
        return 0.0;
    }
    const auto bp = breakpoints(v_K, v_L);
    return integrate_piecewise([&](double z) { return Phibar(z, v_K, v_L); }, v_K, v_L, bp);
}

KineticScheme::KineticScheme(const Scheme& scheme) : scheme_(&scheme) {
    const double area = scheme.grid().face_area();
    for (int axis = 0; axis < scheme.grid().dim(); ++axis) {
        for (int sign : {-1, 1}) {
            faces_.emplace_back(scheme.oriented(axis, sign), area);
        }
    }
}

const KineticFace& KineticScheme::face(int axis, int sign) const {
    return faces_[static_cast<std::size_t>(2 * axis + (sign > 0 ? 1 : 0))];
}

double kinetic_a(const KineticFace& face, double xi, double v, double w) { return face.a(xi, v, w); }
double entropy_flux(const KineticFace& face, double xi, double v, double w) { return face.Phi(xi, v, w); }
double conj_entropy_flux(const KineticFace& face, double xi, double v, double w) { return face.Phibar(xi, v, w); }

// ---------------------------------------------------------------------------

DissipationMeasure::DissipationMeasure(const KineticScheme& kin, const StepRecord& record, std::size_t cell,
                                       std::size_t order)
    : kin_(&kin),
      cell_(cell),
      step_(record.n),
      dt_(record.dt),
      volume_(kin.scheme().grid().cell_volume()),
      v_(record.pre.at(cell)),
      v_half_(record.half.at(cell)),
      order_(order) {
    const TorusGrid& grid = kin.scheme().grid();
    std::vector<double> bp{v_, v_half_};
    lo_ = std::min(v_, v_half_);
    hi_ = std::max(v_, v_half_);
    for (const Face& f : grid.faces(cell)) {
        const KineticFace& kf = kin.face(f);
        const double w = record.pre[f.neighbor];
        neighbors_.emplace_back(&kf, w);
        lo_ = std::min(lo_, w);
        hi_ = std::max(hi_, w);
        const auto fb = kf.breakpoints(v_, w);
        bp.insert(bp.end(), fb.begin(), fb.end());
    }
    breakpoints_ = split_points(lo_, hi_, bp);
    const GaussRule& rule = gauss_legendre(order);
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
        const double a = breakpoints_[i];
        const double b = breakpoints_[i + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double x = mid + half * rule.nodes[q];
            nodes_.push_back(x);
            weights_.push_back(half * rule.weights[q]);
            values_.push_back(raw(x));
        }
    }
}

double DissipationMeasure::raw(double xi) const {
    double s = 0.0;
    for (const auto& [face, w] : neighbors_) {
        s += face->Phi(xi, v_, w);
    }
    const double kink = std::max(v_half_ - xi, 0.0) - std::max(v_ - xi, 0.0);
    return -kink / dt_ - s / volume_;
}

double DissipationMeasure::operator()(double xi) const {
    if (xi < lo_ || xi > hi_) {
        return 0.0;
    }
    return raw(xi);
}

double DissipationMeasure::integrate(const std::function<double(double)>& psi) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        s += weights_[i] * psi(nodes_[i]) * values_[i];
    }
    return s;
}

double DissipationMeasure::integrate(const std::function<double(double)>& psi, std::span<const double> extra) const {
    const auto bp = merged(breakpoints_, extra);
    return integrate_piecewise([&](double x) { return psi(x) * raw(x); }, lo_, hi_, bp, order_);
}

double DissipationMeasure::mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        s += weights_[i] * values_[i];
    }
    return s;
}

double DissipationMeasure::moment(double p) const {
    return integrate([p](double x) { return std::pow(std::abs(x), p); });
}

double DissipationMeasure::mass_above_state() const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i] >= v_) {
            s += weights_[i] * values_[i];
        }
    }
    return s;
}

double DissipationMeasure::mass_below_state() const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i] < v_) {
            s += weights_[i] * values_[i];
        }
    }
    return s;
}

double DissipationMeasure::min_value() const {
    double m = 0.0;
    for (double v : values_) {
        m = std::min(m, v);
    }
    for (double b : breakpoints_) {
        m = std::min(m, raw(b));
    }
    return m;
}

DissipationMeasure dissipation(const KineticScheme& kin, const StepRecord& record, std::size_t cell) {
    return DissipationMeasure(kin, record, cell);
}

// ---------------------------------------------------------------------------

double TestFunction::operator()(double xi) const {
    const double s = (xi - center) / radius;
    if (std::abs(s) >= 1.0) {
        return 0.0;
    }
    const double b = 1.0 - s * s;
    return b * b * b;
}

double TestFunction::derivative(double xi) const {
    const double s = (xi - center) / radius;
    if (std::abs(s) >= 1.0) {
        return 0.0;
    }
    const double b = 1.0 - s * s;
    return -6.0 * s * b * b / radius;
}

double TestFunction::primitive(double xi) const {
    const auto P = [](double s) {
        const double s2 = s * s;
        return s * (1.0 - s2 + s2 * s2 * (3.0 / 5.0) - s2 * s2 * s2 / 7.0);
    };
    const double s = std::clamp((xi - center) / radius, -1.0, 1.0);
    return radius * (P(s) - P(-1.0));
}

namespace {

// Σ_L ∫ a(ξ, v_K, v_L) ψ(ξ) dξ over the support of ψ.
double flux_term(const KineticScheme& kin, const StepRecord& record, std::size_t cell, const TestFunction& psi) {
    const TorusGrid& grid = kin.scheme().grid();
    const double v = record.pre[cell];
    double s = 0.0;
    for (const Face& f : grid.faces(cell)) {
        const KineticFace& kf = kin.face(f);
        const double w = record.pre[f.neighbor];
        const auto bp = kf.breakpoints(v, w);
        s += integrate_piecewise([&](double x) { return kf.a(x, v, w) * psi(x); }, psi.lo(), psi.hi(), bp);
    }
    return s;
}

double dissipation_term(const KineticScheme& kin, const StepRecord& record, std::size_t cell,
                        const TestFunction& psi) {
    const DissipationMeasure m(kin, record, cell);
    const std::vector<double> ends{psi.lo(), psi.hi()};
    return m.integrate([&](double x) { return psi.derivative(x); }, ends);
}

}  // namespace

double kinetic_residual(const KineticScheme& kin, const StepRecord& record, std::size_t cell, const TestFunction& psi) {
    const double vol = kin.scheme().grid().cell_volume();
    const double lhs = vol * (psi.primitive(record.half[cell]) - psi.primitive(record.pre[cell]));
    return lhs + record.dt * flux_term(kin, record, cell, psi) +
           vol * record.dt * dissipation_term(kin, record, cell, psi);
}

double discrete_kinetic_residual(const KineticScheme& kin, const StepRecord& record, std::size_t cell,
                                 std::uint64_t seed, std::size_t J, std::size_t S, const TestFunction& psi) {
    if (J > S) {
        throw ConfigError("discrete_kinetic_residual: J must not exceed S");
    }
    if (J == 0) {
        return 0.0;
    }
    const Scheme& scheme = kin.scheme();
    const CellNoiseTable& table = scheme.table();
    const double vol = scheme.grid().cell_volume();
    const double w = static_cast<double>(J) / static_cast<double>(S);
    const double elapsed = w * record.dt;
    const double ds = record.dt / static_cast<double>(S);
    const double v = record.pre[cell];

    const std::size_t K = table.k_max();
    std::vector<double> g(K);
    for (std::size_t k = 0; k < K; ++k) {
        g[k] = table.g(k, cell, v);
    }
    const double G2 = table.G2(cell, v);
    const auto paths = K > 0 ? brownian_bridge(seed, record.n, record.dt, record.X, S)
                             : std::vector<std::vector<double>>{};
    const auto sharp = [&](std::size_t j) {
        double x = record.half[cell];
        for (std::size_t k = 0; k < K; ++k) {
            x += g[k] * paths[k][j];
        }
        return x;
    };

    const double lhs = w * (psi.primitive(sharp(J)) - psi.primitive(v));
    const double det = -elapsed / vol * flux_term(kin, record, cell, psi) -
                       elapsed * dissipation_term(kin, record, cell, psi);
    double ito = 0.0;
    double drift = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
        const double x = sharp(j);
        const double p = psi(x);
        for (std::size_t k = 0; k < K; ++k) {
            ito += g[k] * p * (paths[k][j + 1] - paths[k][j]);
        }
        drift += psi.derivative(x) * ds;
    }
    const double sto = w * (ito + 0.5 * G2 * drift);
    return lhs - det - sto;
}

double consistency_a1_residual(const KineticFace& face, double v, double w) {
    const double lo = std::min({v, w, 0.0});
    const double hi = std::max({v, w, 0.0});
    auto bp = face.breakpoints(v, w);
    bp.push_back(0.0);
    const double integral = integrate_piecewise(
        [&](double x) { return face.a(x, v, w) - (x < 0.0 ? face.astar(x) : 0.0); }, lo, hi, bp);
    return integral - face.numerical_flux(v, w);
}

double consistency_a2_residual(const KineticFace& face, double v, int samples) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double xi = v - 1.5 + 3.0 * (i + 0.5) / samples;
        const double expect = v > xi ? face.astar(xi) : 0.0;
        worst = std::max(worst, std::abs(face.a(xi, v, v) - expect));
    }
    return worst;
}

double support_residual(const KineticFace& face, double v, double w, int samples) {
    double worst = 0.0;
    const double top = std::max(v, w);
    for (int i = 0; i < samples; ++i) {
        const double xi = top + 2.0 * i / samples;
        worst = std::max(worst, std::abs(face.a(xi, v, w)));
    }
    return worst;
}

double phi_square_gap(const KineticFace& face, double lipschitz, double xi, double v, double w) {
    const double phi = face.Phi(std::max(xi, v), v, w);
    return 2.0 * lipschitz * face.area() * face.weak_bv(v, w) - phi * phi;
}

// ---------------------------------------------------------------------------

namespace {

struct SliceValues {
    double weight;
    std::vector<double> sharp;
    const std::vector<double>* base;
};

SliceValues slice(const Trajectory& tr, const Scheme& scheme, double t) {
    if (tr.records.size() != tr.time.steps()) {
        throw ConfigError("kinetic view: step records were not kept");
    }
    const std::size_t n = tr.time.step_of(t);
    const StepRecord& r = tr.records[n];
    const double w = std::clamp((t - r.t) / r.dt, 0.0, 1.0);
    return {w, v_sharp(r, scheme.table(), tr.seed, std::min(t, r.t + r.dt)), &r.pre};
}

std::size_t cell_of(const TorusGrid& grid, const Point& x) {
    CellIndex idx{0, 0};
    for (int d = 0; d < grid.dim(); ++d) {
        const double u = x[static_cast<std::size_t>(d)] - std::floor(x[static_cast<std::size_t>(d)]);
        idx[static_cast<std::size_t>(d)] =
            std::min(static_cast<int>(u * grid.cells_per_axis()), grid.cells_per_axis() - 1);
    }
    return grid.linear(idx);
}

}  // namespace

double f_delta(const Trajectory& tr, const Scheme& scheme, const Point& x, double t, double xi) {
    const SliceValues s = slice(tr, scheme, t);
    const std::size_t c = cell_of(scheme.grid(), x);
    return s.weight * (s.sharp[c] > xi ? 1.0 : 0.0) + (1.0 - s.weight) * ((*s.base)[c] > xi ? 1.0 : 0.0);
}

double nu_moment(const Trajectory& tr, const Scheme& scheme, double t, double p) {
    const SliceValues s = slice(tr, scheme, t);
    const double vol = scheme.grid().cell_volume();
    double a = 0.0;
    double b = 0.0;
    for (std::size_t c = 0; c < s.sharp.size(); ++c) {
        a += vol * std::pow(std::abs(s.sharp[c]), p);
        b += vol * std::pow(std::abs((*s.base)[c]), p);
    }
    return 1.0 + s.weight * a + (1.0 - s.weight) * b;
}

}  // namespace stofv
