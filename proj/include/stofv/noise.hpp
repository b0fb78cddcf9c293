#pragma once

#include "stofv/mesh.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace stofv {

enum class SpatialShape { constant, sine, cosine };

/// One noise mode g_k(x,u) = σ · max(1-u²,0)^q · T(x), with T in {1, sin, cos}(2π κ·x).
/// A mode may instead carry an arbitrary `custom` g_k(x,u); it must vanish for |u| >= 1.
struct NoiseMode {
    double sigma = 0.0;
    int exponent = 1;  ///< q >= 1
    SpatialShape shape = SpatialShape::sine;
    std::array<int, 2> frequency{1, 0};  ///< κ
    std::function<double(const Point&, double)> custom;

    double profile(double u) const;
    double spatial(const Point& x) const;
    double operator()(const Point& x, double u) const;
};

/// Finite family of noise modes with the constants bounding it.
struct NoiseModel {
    std::vector<NoiseMode> modes;
    double D0 = 0.0;  ///< Σ_k |g_k(x,u)|² <= D0
    double D1 = 0.0;  ///< Σ_k |g_k(x,u) - g_k(y,u)|² <= D1 |x-y|²

    std::size_t k_max() const { return modes.size(); }
    bool is_zero() const;
    double G2(const Point& x, double u) const;
};

/// Model from built-in modes; D0 = Σσ², D1 = Σσ²(2π|κ|)².
NoiseModel make_noise_model(std::vector<NoiseMode> modes);
NoiseModel zero_noise();
/// A single mode σ max(1-u²,0) sin(2πx).
NoiseModel single_mode_noise(double sigma, int dim = 1);

/// Per-cell averaged coefficients g_{k,K}(u) = (1/|K|)∫_K g_k(x,u)dx, evaluated lazily in u.
class CellNoiseTable {
public:
    CellNoiseTable(const NoiseModel& model, const TorusGrid& grid, std::size_t quad_order = 4);

    std::size_t k_max() const { return modes_.size(); }
    std::size_t num_cells() const { return num_cells_; }
    double g(std::size_t k, std::size_t cell, double u) const;
    /// G²_K(u) = Σ_k |g_{k,K}(u)|².
    double G2(std::size_t cell, double u) const;
    /// Σ_k g_{k,K}(u) X_k.
    double contract(std::size_t cell, double u, std::span<const double> X) const;
    /// Spatial average factor of a built-in mode (cell average of T); NaN for custom modes.
    double spatial_average(std::size_t k, std::size_t cell) const;

private:
    std::vector<NoiseMode> modes_;
    std::size_t num_cells_;
    std::vector<double> spatial_;  ///< [k * num_cells + cell]
    std::vector<CellQuadrature> quadrature_;  ///< only filled when a custom mode is present
};

/// Seed-deterministic Gaussian increments X^{n+1}_k.
class WienerIncrements {
public:
    explicit WienerIncrements(std::uint64_t seed) : seed_(seed) {}
    std::uint64_t seed() const { return seed_; }
    double X(std::uint64_t n, std::size_t k) const;
    std::vector<double> step(std::uint64_t n, std::size_t k_max) const;

private:
    std::uint64_t seed_;
};

/// k_max standard normal variates for step n.
std::vector<double> sample_increments(std::uint64_t seed, std::uint64_t n, std::size_t k_max);

/// Coarse normalized increment from fine ones: (Σ_j √δt_j x_j)/√Δt. Throws ConfigError
/// unless the fine steps tile the coarse step (relative tolerance 1e-12).
double couple_time_refinement(std::span<const double> fine_variates, std::span<const double> fine_dts, double coarse_dt);

/// Brownian increments β_k(t_n + j Δt/S) - β_k(t_n), j = 0..S, conditioned on the endpoint
/// √Δt X_k. Built by dyadic midpoint refinement keyed by (seed, n, k, node), so paths at
/// resolution S are restrictions of paths at resolution 2S. S must be a power of two.
std::vector<std::vector<double>> brownian_bridge(std::uint64_t seed, std::uint64_t n, double dt,
                                                 std::span<const double> X, std::size_t substeps);

/// β_k(t_n + s) - β_k(t_n) for one s in [0, Δt]: the dyadic bridge at `resolution` nodes, refined
/// between its two enclosing nodes by one more conditioned draw. Exact in law at each single s.
std::vector<double> brownian_value(std::uint64_t seed, std::uint64_t n, double dt, std::span<const double> X, double s,
                                   std::size_t resolution = 64);

}  // namespace stofv
