#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stofv {

/// Point of the unit torus; only the first `dim` coordinates are meaningful.
using Point = std::array<double, 2>;

/// Multi-index (i_0, i_1) of a cell; i_1 is unused in 1D.
using CellIndex = std::array<int, 2>;

/// Oriented interface K|L seen from its owner K.
struct Face {
    std::size_t owner = 0;
    std::size_t neighbor = 0;
    int axis = 0;
    int sign = 1;  ///< outward normal n_{K,L} = sign * e_axis
};

/// Uniform cartesian mesh of the periodic torus [0,1)^N, N in {1,2}.
///
/// Cells are numbered lexicographically with the last axis fastest:
/// linear index = i_0 in 1D, i_0 * m + i_1 in 2D. All reductions in the
/// library iterate in this order.
class TorusGrid {
public:
    TorusGrid(int dim, int cells_per_axis);

    int dim() const { return dim_; }
    int cells_per_axis() const { return m_; }
    std::size_t num_cells() const { return num_cells_; }
    double h() const { return h_; }
    double cell_volume() const { return volume_; }
    double face_area() const { return face_area_; }
    /// |∂K| = 2N h^{N-1}.
    double boundary_measure() const { return 2.0 * dim_ * face_area_; }
    /// α_N = 2^{-N}.
    double alpha() const { return dim_ == 1 ? 0.5 : 0.25; }
    std::size_t faces_per_cell() const { return static_cast<std::size_t>(2 * dim_); }

    CellIndex index(std::size_t cell) const;
    std::size_t linear(CellIndex idx) const;
    /// Lower corner of the cell.
    Point corner(std::size_t cell) const;
    Point center(std::size_t cell) const;

    /// The 2N faces of `cell`, ordered (axis 0, -), (axis 0, +), (axis 1, -), (axis 1, +).
    std::span<const Face> faces(std::size_t cell) const;

private:
    int dim_;
    int m_;
    std::size_t num_cells_;
    double h_;
    double volume_;
    double face_area_;
    std::vector<Face> faces_;
};

/// Validated construction; throws ConfigError for dim not in {1,2} or m < 1.
TorusGrid build_grid(int dim, int m);

/// Per-cell tensor Gauss–Legendre approximation of (1/|K|)∫_K f.
std::vector<double> cell_average(const std::function<double(const Point&)>& f, const TorusGrid& grid,
                                 std::size_t quad_order = 3);

/// Quadrature points and weights (weights sum to 1) of one cell.
struct CellQuadrature {
    std::vector<Point> points;
    std::vector<double> weights;
};
CellQuadrature cell_quadrature(const TorusGrid& grid, std::size_t cell, std::size_t quad_order);

/// Nested refinement m -> 2m with the parent -> children map.
struct Refinement {
    TorusGrid coarse;
    TorusGrid fine;
    std::vector<std::vector<std::size_t>> children;  ///< children[parent] = 2^N fine cells
    std::vector<std::size_t> parent;                 ///< parent[child]
};

Refinement refine(const TorusGrid& grid);

/// Cell-constant prolongation of coarse values onto the fine grid.
std::vector<double> prolong(const Refinement& r, std::span<const double> coarse);
/// Volume-weighted restriction of fine values onto the coarse grid.
std::vector<double> restrict_to_coarse(const Refinement& r, std::span<const double> fine);

}  // namespace stofv
