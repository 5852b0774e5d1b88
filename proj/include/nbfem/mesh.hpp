#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nbfem/geometry.hpp"
#include "nbfem/lagrange.hpp"

namespace nbfem {

// Uniform simplicial mesh of an axis-aligned box: squares split into two
// triangles along the lower-left/upper-right diagonal in 2D, cubes split
// into six tetrahedra sharing the main diagonal in 3D. Cells and vertices
// are addressed by index and generated on demand; nothing proportional to
// the full mesh is ever stored, so only cells near the band are touched.
template <int Dim>
class BackgroundMesh {
public:
    static constexpr int kSimplicesPerCube = (Dim == 2) ? 2 : 6;

    BackgroundMesh(const Vec<Dim>& box_min, const Vec<Dim>& box_max, int level, double h);

    int level() const { return level_; }
    double h() const { return h_; }
    const Vec<Dim>& box_min() const { return box_min_; }
    const Vec<Dim>& box_max() const { return box_max_; }
    std::int64_t cubes_per_axis() const { return n_; }
    std::int64_t cube_count() const;
    std::int64_t cell_count() const { return cube_count() * kSimplicesPerCube; }

    // Integer grid coordinates (in h units) of a cell's vertices, positively
    // oriented.
    std::array<std::array<std::int64_t, Dim>, Dim + 1> cell_vertex_grid(std::int64_t cell) const;

    std::array<Vec<Dim>, Dim + 1> cell_vertices(std::int64_t cell) const;

    // Canonical coordinate of a node on the order-r lattice (pitch h/r);
    // every cell computes shared node positions from the same formula.
    Vec<Dim> lattice_coord(const std::array<std::int64_t, Dim>& node, int order) const;

    // Flat id of an order-r lattice node (lexicographic, z-major).
    std::int64_t lattice_id(const std::array<std::int64_t, Dim>& node, int order) const;
    std::array<std::int64_t, Dim> lattice_from_id(std::int64_t id, int order) const;

    // Order-r lattice coordinates of every Lagrange node of a cell, in the
    // LagrangeBasis node order.
    void cell_lattice_nodes(std::int64_t cell, const LagrangeBasis<Dim>& basis,
                            std::array<std::int64_t, Dim>* out) const;

    // Containing cell and barycentric coordinates; throws PointOutsideCell
    // when x is outside the box.
    std::pair<std::int64_t, Eigen::Matrix<double, Dim + 1, 1>> locate(const Vec<Dim>& x) const;

private:
    Vec<Dim> box_min_, box_max_;
    int level_;
    double h_;
    std::int64_t n_;
};

// Mesh of (-2,2)^Dim at refinement level `level` with the mesh-size law
// h = 0.1 * 2^-level in 2D and h = 0.2 * 2^-level in 3D. Throws
// ResourceLimit if the implied cell count exceeds `cell_cap`.
template <int Dim>
BackgroundMesh<Dim> build_background_mesh(int level, std::int64_t cell_cap = 1'000'000'000);

// Continuous piecewise-polynomial interpolant of a level-set function: nodal
// values are exact evaluations at the order-q Lagrange lattice, so the field
// is single-valued across faces by construction.
template <int Dim>
class InterpolatedLevelSet {
public:
    InterpolatedLevelSet(const BackgroundMesh<Dim>& mesh,
                         std::function<double(const Vec<Dim>&)> phi, int order);

    int order() const { return basis_.order(); }
    const LagrangeBasis<Dim>& basis() const { return basis_; }
    const BackgroundMesh<Dim>& mesh() const { return *mesh_; }

    // Exact level-set values at the cell's Lagrange nodes (basis node order).
    void cell_values(std::int64_t cell, std::span<double> out) const;

    // Interpolant value at a physical point of the given cell.
    double evaluate(std::int64_t cell, const Vec<Dim>& x) const;

    double exact(const Vec<Dim>& x) const { return phi_(x); }

private:
    const BackgroundMesh<Dim>* mesh_;
    std::function<double(const Vec<Dim>&)> phi_;
    LagrangeBasis<Dim> basis_;
};

enum class CellClass : std::uint8_t { FullyInsideBand = 0, Cut = 1 };

// Cells of the background mesh that meet the discrete band {|phi_h| < d},
// sorted by cell index, with the interpolant's nodal values cached per cell.
template <int Dim>
struct ActiveMesh {
    const BackgroundMesh<Dim>* mesh = nullptr;
    int geometry_order = 1;
    int subdivision = 1; // surrogate refinements per cell edge (order >= 2)
    double band_halfwidth = 0.0;
    int nodes_per_cell = 0;

    std::vector<std::int64_t> cells;
    std::vector<CellClass> classes;
    std::vector<double> nodal_phi; // stride nodes_per_cell

    std::size_t size() const { return cells.size(); }
    std::span<const double> cell_phi(std::size_t i) const {
        return {nodal_phi.data() + i * static_cast<std::size_t>(nodes_per_cell),
                static_cast<std::size_t>(nodes_per_cell)};
    }
};

// Nodal values equal to the band half-width or to zero are nudged by
// +1e-12*d before classification so no cut passes exactly through a node.
double tie_break(double value, double d);

// Selects cells whose band intersection is nonempty. For geometry order 1
// activity is decided from the vertex values of the linear interpolant; for
// higher orders it is decided on the piecewise-linear surrogate obtained by
// sampling the interpolant on a `subdivision`-fold refinement of each cell.
// Throws EmptyBand when nothing is active.
template <int Dim>
ActiveMesh<Dim> select_active_cells(const BackgroundMesh<Dim>& mesh,
                                    const InterpolatedLevelSet<Dim>& phi_h, double d,
                                    int subdivision = 1);

extern template class BackgroundMesh<2>;
extern template class BackgroundMesh<3>;
extern template BackgroundMesh<2> build_background_mesh<2>(int, std::int64_t);
extern template BackgroundMesh<3> build_background_mesh<3>(int, std::int64_t);
extern template class InterpolatedLevelSet<2>;
extern template class InterpolatedLevelSet<3>;
extern template ActiveMesh<2> select_active_cells<2>(const BackgroundMesh<2>&,
                                                     const InterpolatedLevelSet<2>&, double, int);
extern template ActiveMesh<3> select_active_cells<3>(const BackgroundMesh<3>&,
                                                     const InterpolatedLevelSet<3>&, double, int);

} // namespace nbfem
