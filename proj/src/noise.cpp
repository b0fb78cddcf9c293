#include "stofv/noise.hpp"

#include "stofv/errors.hpp"
#include "stofv/rng.hpp"

#include <cmath>
#include <algorithm>
#include <complex>
#include <limits>
#include <numbers>

namespace stofv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Cell average of exp(i 2π κ·x) over the cell with lower corner `lo` and edge h.
std::complex<double> average_exponential(const std::array<int, 2>& kappa, const Point& lo, double h, int dim) {
    std::complex<double> out{1.0, 0.0};
    for (int d = 0; d < dim; ++d) {
        const double k = kappa[static_cast<std::size_t>(d)];
        if (k == 0.0) {
            continue;
        }
        const double phi = kTwoPi * k * h;
        const std::complex<double> start = std::polar(1.0, kTwoPi * k * lo[static_cast<std::size_t>(d)]);
        const std::complex<double> factor = (std::polar(1.0, phi) - 1.0) / std::complex<double>(0.0, phi);
        out *= start * factor;
    }
    return out;
}

}  // namespace

double NoiseMode::profile(double u) const {
    const double base = 1.0 - u * u;
    return base > 0.0 ? std::pow(base, exponent) : 0.0;
}

double NoiseMode::spatial(const Point& x) const {
    const double phase = kTwoPi * (frequency[0] * x[0] + frequency[1] * x[1]);
    switch (shape) {
        case SpatialShape::constant: return 1.0;
        case SpatialShape::sine: return std::sin(phase);
        case SpatialShape::cosine: return std::cos(phase);
    }
    return 0.0;
}

double NoiseMode::operator()(const Point& x, double u) const {
    if (custom) {
        return custom(x, u);
    }
    return sigma * profile(u) * spatial(x);
}

bool NoiseModel::is_zero() const {
    for (const auto& m : modes) {
        if (m.custom || m.sigma != 0.0) {
            return false;
        }
    }
    return true;
}

double NoiseModel::G2(const Point& x, double u) const {
    double s = 0.0;
    for (const auto& m : modes) {
        const double g = m(x, u);
        s += g * g;
    }
    return s;
}

NoiseModel make_noise_model(std::vector<NoiseMode> modes) {
    NoiseModel model;
    for (const auto& m : modes) {
        if (m.custom) {
            throw ConfigError("noise: custom modes need explicit D0/D1; build NoiseModel directly");
        }
        if (m.exponent < 1) {
            throw ConfigError("noise: exponent q must be >= 1");
        }
        const double kappa2 = static_cast<double>(m.frequency[0]) * m.frequency[0] +
                              static_cast<double>(m.frequency[1]) * m.frequency[1];
        model.D0 += m.sigma * m.sigma;
        if (m.shape != SpatialShape::constant) {
            model.D1 += m.sigma * m.sigma * kTwoPi * kTwoPi * kappa2;
        }
    }
    model.modes = std::move(modes);
    return model;
}

NoiseModel zero_noise() { return NoiseModel{}; }

NoiseModel single_mode_noise(double sigma, int dim) {
    NoiseMode m;
    m.sigma = sigma;
    m.exponent = 1;
    m.shape = SpatialShape::sine;
    m.frequency = {1, 0};
    (void)dim;
    return make_noise_model({m});
}

// ---------------------------------------------------------------------------

CellNoiseTable::CellNoiseTable(const NoiseModel& model, const TorusGrid& grid, std::size_t quad_order)
    : modes_(model.modes), num_cells_(grid.num_cells()) {
    spatial_.assign(modes_.size() * num_cells_, std::numeric_limits<double>::quiet_NaN());
    bool any_custom = false;
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        const NoiseMode& m = modes_[k];
        if (m.custom) {
            any_custom = true;
            continue;
        }
        for (std::size_t c = 0; c < num_cells_; ++c) {
            double avg = 1.0;
            if (m.shape != SpatialShape::constant) {
                const auto e = average_exponential(m.frequency, grid.corner(c), grid.h(), grid.dim());
                avg = m.shape == SpatialShape::sine ? e.imag() : e.real();
            }
            spatial_[k * num_cells_ + c] = avg;
        }
    }
    if (any_custom) {
        quadrature_.reserve(num_cells_);
        for (std::size_t c = 0; c < num_cells_; ++c) {
            quadrature_.push_back(cell_quadrature(grid, c, quad_order));
        }
    }
}

double CellNoiseTable::g(std::size_t k, std::size_t cell, double u) const {
    const NoiseMode& m = modes_[k];
    if (!m.custom) {
        return m.sigma * m.profile(u) * spatial_[k * num_cells_ + cell];
    }
    const CellQuadrature& q = quadrature_[cell];
    double s = 0.0;
    for (std::size_t i = 0; i < q.points.size(); ++i) {
        s += q.weights[i] * m.custom(q.points[i], u);
    }
    return s;
}

double CellNoiseTable::G2(std::size_t cell, double u) const {
    double s = 0.0;
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        const double gk = g(k, cell, u);
        s += gk * gk;
    }
    return s;
}

double CellNoiseTable::contract(std::size_t cell, double u, std::span<const double> X) const {
    double s = 0.0;
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        s += g(k, cell, u) * X[k];
    }
    return s;
}

double CellNoiseTable::spatial_average(std::size_t k, std::size_t cell) const {
    return spatial_[k * num_cells_ + cell];
}

// ---------------------------------------------------------------------------

double WienerIncrements::X(std::uint64_t n, std::size_t k) const {
    return keyed_normal(seed_, n, static_cast<std::uint32_t>(k), 0);
}

std::vector<double> WienerIncrements::step(std::uint64_t n, std::size_t k_max) const {
    std::vector<double> out(k_max);
    for (std::size_t k = 0; k < k_max; ++k) {
        out[k] = X(n, k);
    }
    return out;
}

std::vector<double> sample_increments(std::uint64_t seed, std::uint64_t n, std::size_t k_max) {
    return WienerIncrements(seed).step(n, k_max);
}

double couple_time_refinement(std::span<const double> fine_variates, std::span<const double> fine_dts, double coarse_dt) {
    if (fine_variates.size() != fine_dts.size() || fine_dts.empty()) {
        throw ConfigError("couple_time_refinement: variates and substeps differ in count");
    }
    double total = 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < fine_dts.size(); ++j) {
        total += fine_dts[j];
        s += std::sqrt(fine_dts[j]) * fine_variates[j];
    }
    if (std::abs(total - coarse_dt) > 1e-12 * coarse_dt) {
        throw ConfigError("couple_time_refinement: fine substeps do not tile the coarse step");
    }
    return s / std::sqrt(coarse_dt);
}

std::vector<std::vector<double>> brownian_bridge(std::uint64_t seed, std::uint64_t n, double dt,
                                                 std::span<const double> X, std::size_t substeps) {
    if (substeps == 0 || (substeps & (substeps - 1)) != 0) {
        throw ConfigError("brownian_bridge: substeps must be a power of two");
    }
    std::size_t levels = 0;
    while ((std::size_t{1} << levels) < substeps) {
        ++levels;
    }
    std::vector<std::vector<double>> paths(X.size(), std::vector<double>(substeps + 1, 0.0));
    for (std::size_t k = 0; k < X.size(); ++k) {
        auto& b = paths[k];
        b[substeps] = std::sqrt(dt) * X[k];
        for (std::size_t level = 1; level <= levels; ++level) {
            const std::size_t stride = substeps >> level;  // half-width of the parent interval
            const std::size_t count = std::size_t{1} << (level - 1);
            const double parent_len = dt * static_cast<double>(2 * stride) / static_cast<double>(substeps);
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t mid = (2 * i + 1) * stride;
                const auto node = static_cast<std::uint32_t>(count + i);
                const double z = keyed_normal(seed, n, static_cast<std::uint32_t>(k), node);
                b[mid] = 0.5 * (b[mid - stride] + b[mid + stride]) + std::sqrt(0.25 * parent_len) * z;
            }
        }
    }
    return paths;
}

std::vector<double> brownian_value(std::uint64_t seed, std::uint64_t n, double dt, std::span<const double> X, double s,
                                   std::size_t resolution) {
    if (!(s >= 0.0 && s <= dt)) {
        throw ConfigError("brownian_value: time outside the step");
    }
    const auto paths = brownian_bridge(seed, n, dt, X, resolution);
    const double delta = dt / static_cast<double>(resolution);
    const auto j = std::min(static_cast<std::size_t>(s / delta), resolution - 1);
    const double a = s - static_cast<double>(j) * delta;
    std::vector<double> out(X.size());
    for (std::size_t k = 0; k < X.size(); ++k) {
        const double left = paths[k][j];
        const double right = paths[k][j + 1];
        if (a <= 0.0) {
            out[k] = left;
            continue;
        }
        if (a >= delta) {
            out[k] = right;
            continue;
        }
        const double z = keyed_normal(seed, n, static_cast<std::uint32_t>(k), 0x80000000u | static_cast<std::uint32_t>(j));
        out[k] = left + (a / delta) * (right - left) + std::sqrt(a * (delta - a) / delta) * z;
    }
    return out;
}

}  // namespace stofv
