#include "stofv/mesh.hpp"

#include "stofv/errors.hpp"
#include "stofv/quadrature.hpp"

#include <cmath>
#include <string>

namespace stofv {

TorusGrid::TorusGrid(int dim, int cells_per_axis)
    : dim_(dim), m_(cells_per_axis) {
    if (dim != 1 && dim != 2) {
        throw ConfigError("grid: dim must be 1 or 2, got " + std::to_string(dim));
    }
    if (cells_per_axis < 1) {
        throw ConfigError("grid: m must be >= 1, got " + std::to_string(cells_per_axis));
    }
    num_cells_ = dim == 1 ? static_cast<std::size_t>(m_) : static_cast<std::size_t>(m_) * m_;
    h_ = 1.0 / m_;
    volume_ = dim == 1 ? h_ : h_ * h_;
    face_area_ = dim == 1 ? 1.0 : h_;

    faces_.reserve(num_cells_ * faces_per_cell());
    for (std::size_t c = 0; c < num_cells_; ++c) {
        const CellIndex idx = index(c);
        for (int axis = 0; axis < dim_; ++axis) {
            for (int sign : {-1, 1}) {
                CellIndex nb = idx;
                nb[axis] = ((nb[axis] + sign) % m_ + m_) % m_;
                faces_.push_back(Face{c, linear(nb), axis, sign});
            }
        }
    }
}

CellIndex TorusGrid::index(std::size_t cell) const {
    const auto c = static_cast<int>(cell);
    if (dim_ == 1) {
        return {c, 0};
    }
    return {c / m_, c % m_};
}

std::size_t TorusGrid::linear(CellIndex idx) const {
    if (dim_ == 1) {
        return static_cast<std::size_t>(idx[0]);
    }
    return static_cast<std::size_t>(idx[0]) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(idx[1]);
}

Point TorusGrid::corner(std::size_t cell) const {
    const CellIndex idx = index(cell);
    return {idx[0] * h_, dim_ == 2 ? idx[1] * h_ : 0.0};
}

Point TorusGrid::center(std::size_t cell) const {
    Point p = corner(cell);
    p[0] += 0.5 * h_;
    if (dim_ == 2) {
        p[1] += 0.5 * h_;
    }
    return p;
}

std::span<const Face> TorusGrid::faces(std::size_t cell) const {
    return {faces_.data() + cell * faces_per_cell(), faces_per_cell()};
}

TorusGrid build_grid(int dim, int m) { return TorusGrid(dim, m); }

CellQuadrature cell_quadrature(const TorusGrid& grid, std::size_t cell, std::size_t quad_order) {
    const GaussRule& rule = gauss_legendre(quad_order);
    const Point lo = grid.corner(cell);
    const double h = grid.h();
    CellQuadrature q;
    const std::size_t n = rule.nodes.size();
    if (grid.dim() == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            q.points.push_back({lo[0] + 0.5 * h * (rule.nodes[i] + 1.0), 0.0});
            q.weights.push_back(0.5 * rule.weights[i]);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                q.points.push_back({lo[0] + 0.5 * h * (rule.nodes[i] + 1.0), lo[1] + 0.5 * h * (rule.nodes[j] + 1.0)});
                q.weights.push_back(0.25 * rule.weights[i] * rule.weights[j]);
            }
        }
    }
    return q;
}

std::vector<double> cell_average(const std::function<double(const Point&)>& f, const TorusGrid& grid,
                                 std::size_t quad_order) {
    std::vector<double> out(grid.num_cells());
    for (std::size_t c = 0; c < grid.num_cells(); ++c) {
        const CellQuadrature q = cell_quadrature(grid, c, quad_order);
        double s = 0.0;
        for (std::size_t i = 0; i < q.points.size(); ++i) {
            s += q.weights[i] * f(q.points[i]);
        }
        out[c] = s;
    }
    return out;
}

Refinement refine(const TorusGrid& grid) {
    Refinement r{grid, TorusGrid(grid.dim(), 2 * grid.cells_per_axis()), {}, {}};
    r.children.resize(grid.num_cells());
    r.parent.resize(r.fine.num_cells());
    for (std::size_t f = 0; f < r.fine.num_cells(); ++f) {
        CellIndex idx = r.fine.index(f);
        idx[0] /= 2;
        idx[1] /= 2;
        const std::size_t p = grid.linear(idx);
        r.parent[f] = p;
        r.children[p].push_back(f);
    }
    return r;
}

std::vector<double> prolong(const Refinement& r, std::span<const double> coarse) {
    std::vector<double> out(r.fine.num_cells());
    for (std::size_t f = 0; f < out.size(); ++f) {
        out[f] = coarse[r.parent[f]];
    }
    return out;
}

std::vector<double> restrict_to_coarse(const Refinement& r, std::span<const double> fine) {
    std::vector<double> out(r.coarse.num_cells(), 0.0);
    const double ratio = r.fine.cell_volume() / r.coarse.cell_volume();
    for (std::size_t p = 0; p < out.size(); ++p) {
        double s = 0.0;
        for (std::size_t f : r.children[p]) {
            s += ratio * fine[f];
        }
        out[p] = s;
    }
    return out;
}

}  // namespace stofv
