#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "nbfem/cutgeom.hpp"
#include "nbfem/lagrange.hpp"
#include "nbfem/linalg.hpp"
#include "nbfem/mesh.hpp"

namespace nbfem {

// Continuous Lagrange space on the active cells. Dof numbering follows the
// global node lattice (sorted flat ids), which is deterministic and shared
// across faces.
template <int Dim>
struct FeSpace {
    int order = 1;
    const ActiveMesh<Dim>* active = nullptr;
    LagrangeBasis<Dim> basis{1};
    std::vector<std::int64_t> lattice;   // sorted unique node ids
    std::vector<std::int32_t> cell_dofs; // size() * basis.count()
    std::vector<Vec<Dim>> dof_coords;

    std::int64_t ndof() const { return static_cast<std::int64_t>(lattice.size()); }
    std::span<const std::int32_t> dofs_of(std::size_t active_index) const {
        const auto nb = static_cast<std::size_t>(basis.count());
        return {cell_dofs.data() + active_index * nb, nb};
    }
    std::int32_t dof_of_lattice(std::int64_t id) const;
};

// Builds the order-r space; r in {1,2,3} in 2D, r = 1 in 3D.
template <int Dim>
FeSpace<Dim> build_space(const ActiveMesh<Dim>& active, int r);

template <int Dim>
struct FeSystem {
    SparseSym matrix;
    std::vector<double> rhs;
};

// Pointwise data of the band bilinear form at a quadrature point: diffusion
// tensor (with the weight folded in) and the scalar weight for the mass and
// load terms.
template <int Dim>
using CoefficientFn = std::function<void(const Vec<Dim>& x, Mat<Dim>& a, double& mu)>;

// Element contribution over the supplied quadrature points:
//   m(i,j) = sum w [grad_i . A grad_j + alpha mu psi_i psi_j]
//   r(i)   = sum w [f mu psi_i]
// The matrix is filled symmetrically (upper triangle mirrored bitwise).
template <int Dim>
void element_system(const std::array<Vec<Dim>, Dim + 1>& vertices, const LagrangeBasis<Dim>& basis,
                    const std::vector<VolumePoint<Dim>>& quad, const CoefficientFn<Dim>& coeff,
                    double alpha, const std::function<double(const Vec<Dim>&)>& load,
                    Eigen::MatrixXd& m, Eigen::VectorXd& r);

// Assembles the band system with user-supplied pointwise data. `load` is
// evaluated directly at quadrature points (already extended off the surface).
template <int Dim>
FeSystem<Dim> assemble_generic(const FeSpace<Dim>& space, const CutGeometry<Dim>& geom,
                               const CoefficientFn<Dim>& coeff, double alpha,
                               const std::function<double(const Vec<Dim>&)>& load,
                               int threads = 1);

// Assembles the extended surface equation: diffusion tensor and weight from
// the surface in the given mode, data f extended along normals through the
// closest-point map. Natural boundary conditions; no boundary terms.
template <int Dim>
FeSystem<Dim> assemble(const FeSpace<Dim>& space, const Surface<Dim>& surface,
                       CoefficientMode mode, double alpha,
                       const std::function<double(const Vec<Dim>&)>& f,
                       const CutGeometry<Dim>& geom, int threads = 1);

// Value and gradient of a discrete function at x inside the given active
// cell. Throws PointOutsideCell when x lies outside it.
template <int Dim>
std::pair<double, Vec<Dim>> evaluate(const FeSpace<Dim>& space, std::span<const double> coeffs,
                                     std::size_t active_index, const Vec<Dim>& x);

// Nodal interpolant: coefficients sampled at the dof coordinates.
template <int Dim>
std::vector<double> interpolate(const FeSpace<Dim>& space,
                                const std::function<double(const Vec<Dim>&)>& fn);

extern template struct FeSpace<2>;
extern template struct FeSpace<3>;

} // namespace nbfem
