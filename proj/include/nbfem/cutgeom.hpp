#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nbfem/mesh.hpp"
#include "nbfem/quadrature.hpp"

namespace nbfem {

// Simplex with a linear level-set field given by its vertex values.
template <int Dim>
struct Simplex {
    std::array<Vec<Dim>, Dim + 1> v;
    std::array<double, Dim + 1> phi;
};

template <int Dim>
struct VolumePoint {
    Vec<Dim> x;
    double w;
};

template <int Dim>
struct TracePoint {
    Vec<Dim> x;
    double w;
    Vec<Dim> conormal; // unit gradient of the local linear level set
};

// Per-cell clipped band geometry: a simplex cover of T intersected with the
// band, a volume rule on it, and a surface rule on the zero level inside T.
template <int Dim>
struct CutRegion {
    std::int64_t cell = -1;
    std::vector<Simplex<Dim>> sub_simplices;
    std::vector<VolumePoint<Dim>> volume_quad;
    std::vector<TracePoint<Dim>> trace_quad;
};

template <int Dim>
double simplex_measure(const Simplex<Dim>& s);

// Clips the part of `cell` where the linear interpolant of the vertex values
// lies strictly inside (-d, d). Returns a simplex partition of the clipped
// polytope (the cell itself when it is entirely inside the band).
template <int Dim>
std::vector<Simplex<Dim>> clip_cell(const Simplex<Dim>& cell, double d);

// Maps a reference rule of the requested exactness degree onto each
// sub-simplex. Throws UnsupportedDegree for degree > 6.
template <int Dim>
std::vector<VolumePoint<Dim>> volume_quadrature(const std::vector<Simplex<Dim>>& sub_simplices,
                                                int degree);

// Rule on the zero level of the linear vertex field inside the simplex:
// Gauss points on the segment in 2D, a triangle rule on the planar polygon
// (one or two facets) in 3D. Throws NoIntersection for a uniform sign.
template <int Dim>
std::vector<TracePoint<Dim>> trace_quadrature(const Simplex<Dim>& cell, int degree);

template <>
std::vector<TracePoint<2>> trace_quadrature(const Simplex<2>& cell, int degree);
template <>
std::vector<TracePoint<3>> trace_quadrature(const Simplex<3>& cell, int degree);

// Level-set samples on the principal lattice of an m-fold refined cell; the
// piecewise-linear field on the refinement is the integration surrogate for
// higher-order level sets (2D only).
template <int Dim>
struct SubTriangulation {
    std::int64_t cell = -1;
    int m = 1;
    std::vector<double> node_phi; // (m+1)(m+2)/2 values, lattice order
};

// Samples the cell's order-q interpolant at the sub-lattice nodes. Throws
// ResourceLimit when m*m exceeds `cell_cap`.
template <int Dim>
SubTriangulation<Dim> subtriangulate(const InterpolatedLevelSet<Dim>& phi_h, std::int64_t cell,
                                     int m, std::int64_t cell_cap = 1'000'000);

// Produces the CutRegion of each active cell on demand. Construction is
// cheap; region() is pure and safe to call concurrently.
template <int Dim>
class CutGeometry {
public:
    CutGeometry(const ActiveMesh<Dim>& active, int volume_degree, int trace_degree);

    const ActiveMesh<Dim>& active() const { return *active_; }
    int volume_degree() const { return volume_degree_; }

    CutRegion<Dim> region(std::size_t active_index) const;

private:
    const ActiveMesh<Dim>* active_;
    int volume_degree_;
    int trace_degree_;
    std::vector<RefQuadPoint<Dim>> volume_rule_;
    // Surrogate tables (geometry order >= 2): basis values at sub-lattice
    // nodes and the node indices of each sub-simplex.
    std::vector<double> sub_table_;
    std::vector<std::array<int, 3>> sub_cells_;
    std::vector<std::array<int, 2>> sub_nodes_;
};

extern template class CutGeometry<2>;
extern template class CutGeometry<3>;

} // namespace nbfem
