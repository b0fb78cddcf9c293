#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stofv {

/// Gauss–Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss–Legendre rule with `order` nodes (exact for degree 2*order-1).
/// Rules are computed once per order and cached.
const GaussRule& gauss_legendre(std::size_t order);

/// Composite Gauss quadrature of f over [lo, hi], split at every breakpoint
/// that falls strictly inside. Breakpoints need not be sorted or unique; hi < lo flips the sign.
double integrate_piecewise(const std::function<double(double)>& f, double lo, double hi,
                           std::span<const double> breakpoints, std::size_t order = 5);

/// Sorted, deduplicated copy of the points lying in [lo, hi], with lo and hi prepended/appended.
std::vector<double> split_points(double lo, double hi, std::span<const double> breakpoints);

}  // namespace stofv
