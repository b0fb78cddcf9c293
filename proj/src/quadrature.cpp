#include "stofv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace stofv {

namespace {

GaussRule compute_rule(std::size_t order) {
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const auto n = static_cast<double>(order);
    for (std::size_t i = 0; i < order; ++i) {
        // Chebyshev initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= order; ++k) {
                const auto kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule.nodes[order - 1 - i] = x;
        rule.weights[order - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t order) {
    if (order == 0) {
        throw std::invalid_argument("gauss_legendre: order must be >= 1");
    }
    static std::mutex mutex;
    static std::map<std::size_t, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, compute_rule(order)).first;
    }
    return it->second;
}

std::vector<double> split_points(double lo, double hi, std::span<const double> breakpoints) {
    std::vector<double> pts;
    pts.reserve(breakpoints.size() + 2);
    pts.push_back(lo);
    for (double b : breakpoints) {
        if (b > lo && b < hi) {
            pts.push_back(b);
        }
    }
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double integrate_piecewise(const std::function<double(double)>& f, double lo, double hi,
                           std::span<const double> breakpoints, std::size_t order) {
    if (hi < lo) {
        return -integrate_piecewise(f, hi, lo, breakpoints, order);
    }
    if (!(hi > lo)) {
        return 0.0;
    }
    const GaussRule& rule = gauss_legendre(order);
    const auto pts = split_points(lo, hi, breakpoints);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i];
        const double b = pts[i + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            s += rule.weights[q] * f(mid + half * rule.nodes[q]);
        }
        total += half * s;
    }
    return total;
}

}  // namespace stofv
