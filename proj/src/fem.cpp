#include "nbfem/fem.hpp"

#include <algorithm>
#include <cmath>

#include "nbfem/parallel.hpp"

namespace nbfem {

template <int Dim>
std::int32_t FeSpace<Dim>::dof_of_lattice(std::int64_t id) const {
    const auto it = std::lower_bound(lattice.begin(), lattice.end(), id);
    if (it == lattice.end() || *it != id) throw PointOutsideCell("node is not a dof of the space");
    return static_cast<std::int32_t>(it - lattice.begin());
}

template <int Dim>
FeSpace<Dim> build_space(const ActiveMesh<Dim>& active, int r) {
    if (r < 1 || r > 3) throw Unsupported("element order must be 1, 2, or 3");
    if (Dim == 3 && r != 1) throw Unsupported("element order > 1 is 2D-only");

    FeSpace<Dim> space;
    space.order = r;
    space.active = &active;
    space.basis = LagrangeBasis<Dim>(r);
    const int nb = space.basis.count();

    std::vector<std::int64_t> ids;
    ids.reserve(active.size() * static_cast<std::size_t>(nb));
    std::array<std::array<std::int64_t, Dim>, 10> nodes;
    for (std::size_t c = 0; c < active.size(); ++c) {
        active.mesh->cell_lattice_nodes(active.cells[c], space.basis, nodes.data());
        for (int i = 0; i < nb; ++i) ids.push_back(active.mesh->lattice_id(nodes[static_cast<size_t>(i)], r));
    }
    space.lattice = ids;
    std::sort(space.lattice.begin(), space.lattice.end());
    space.lattice.erase(std::unique(space.lattice.begin(), space.lattice.end()),
                        space.lattice.end());

    space.cell_dofs.resize(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const auto it = std::lower_bound(space.lattice.begin(), space.lattice.end(), ids[k]);
        space.cell_dofs[k] = static_cast<std::int32_t>(it - space.lattice.begin());
    }

    space.dof_coords.resize(space.lattice.size());
    for (std::size_t k = 0; k < space.lattice.size(); ++k) {
        space.dof_coords[k] =
            active.mesh->lattice_coord(active.mesh->lattice_from_id(space.lattice[k], r), r);
    }
    return space;
}

template <int Dim>
void element_system(const std::array<Vec<Dim>, Dim + 1>& vertices, const LagrangeBasis<Dim>& basis,
                    const std::vector<VolumePoint<Dim>>& quad, const CoefficientFn<Dim>& coeff,
                    double alpha, const std::function<double(const Vec<Dim>&)>& load,
                    Eigen::MatrixXd& m, Eigen::VectorXd& r) {
    const int nb = basis.count();
    m.setZero(nb, nb);
    r.setZero(nb);

    Mat<Dim> j;
    for (int k = 0; k < Dim; ++k) j.col(k) = vertices[static_cast<size_t>(k) + 1] - vertices[0];
    const Mat<Dim> jinv = j.inverse();
    const Mat<Dim> jinv_t = jinv.transpose();

    std::vector<double> psi(static_cast<size_t>(nb));
    std::vector<Vec<Dim>> grad(static_cast<size_t>(nb)), agrad(static_cast<size_t>(nb));
    Mat<Dim> a;
    double mu = 1.0;

    for (const auto& qp : quad) {
        const Vec<Dim> xi = jinv * (qp.x - vertices[0]);
        for (int i = 0; i < nb; ++i) {
            psi[static_cast<size_t>(i)] = basis.value(i, xi);
            grad[static_cast<size_t>(i)] = jinv_t * basis.gradient(i, xi);
        }
        coeff(qp.x, a, mu);
        const double fv = load ? load(qp.x) : 0.0;
        for (int i = 0; i < nb; ++i) {
            agrad[static_cast<size_t>(i)] = a * grad[static_cast<size_t>(i)];
            r[i] += qp.w * fv * mu * psi[static_cast<size_t>(i)];
        }
        for (int i = 0; i < nb; ++i) {
            for (int jj = i; jj < nb; ++jj) {
                m(i, jj) += qp.w * (grad[static_cast<size_t>(i)].dot(agrad[static_cast<size_t>(jj)]) +
                                    alpha * mu * psi[static_cast<size_t>(i)] * psi[static_cast<size_t>(jj)]);
            }
        }
    }
    for (int i = 0; i < nb; ++i) {
        for (int jj = 0; jj < i; ++jj) m(i, jj) = m(jj, i);
    }
}

namespace {

template <int Dim>
SparseSym build_pattern(const FeSpace<Dim>& space) {
    const std::int64_t n = space.ndof();
    const int nb = space.basis.count();
    std::vector<std::vector<std::int32_t>> adj(static_cast<size_t>(n));
    for (std::size_t c = 0; c < space.active->size(); ++c) {
        const auto dofs = space.dofs_of(c);
        for (int i = 0; i < nb; ++i) {
            auto& row = adj[static_cast<size_t>(dofs[static_cast<size_t>(i)])];
            for (int jj = 0; jj < nb; ++jj) row.push_back(dofs[static_cast<size_t>(jj)]);
        }
    }
    SparseSym mat;
    mat.n = n;
    mat.row_offsets.assign(static_cast<size_t>(n) + 1, 0);
    for (std::int64_t rr = 0; rr < n; ++rr) {
        auto& row = adj[static_cast<size_t>(rr)];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        mat.row_offsets[static_cast<size_t>(rr) + 1] = mat.row_offsets[static_cast<size_t>(rr)] + static_cast<std::int64_t>(row.size());
    }
    mat.cols.resize(static_cast<size_t>(mat.row_offsets.back()));
    for (std::int64_t rr = 0; rr < n; ++rr) {
        std::copy(adj[static_cast<size_t>(rr)].begin(), adj[static_cast<size_t>(rr)].end(),
                  mat.cols.begin() + mat.row_offsets[static_cast<size_t>(rr)]);
    }
    mat.vals.assign(mat.cols.size(), 0.0);
    return mat;
}

} // namespace

template <int Dim>
FeSystem<Dim> assemble_generic(const FeSpace<Dim>& space, const CutGeometry<Dim>& geom,
                               const CoefficientFn<Dim>& coeff, double alpha,
                               const std::function<double(const Vec<Dim>&)>& load, int threads) {
    if (&geom.active() != space.active) {
        throw DimensionMismatch("cut geometry and space use different active meshes");
    }
    FeSystem<Dim> sys;
    sys.matrix = build_pattern(space);
    sys.rhs.assign(static_cast<size_t>(space.ndof()), 0.0);

    const int nb = space.basis.count();
    const std::size_t ncells = space.active->size();
    constexpr std::size_t kBlock = 16384;
    std::vector<Eigen::MatrixXd> mloc(std::min(kBlock, ncells));
    std::vector<Eigen::VectorXd> rloc(mloc.size());

    for (std::size_t base = 0; base < ncells; base += kBlock) {
        const std::size_t count = std::min(kBlock, ncells - base);
        parallel_for_chunks(static_cast<std::int64_t>(count), threads,
                            [&](std::int64_t lo, std::int64_t hi) {
                                for (std::int64_t k = lo; k < hi; ++k) {
                                    const std::size_t c = base + static_cast<std::size_t>(k);
                                    const auto region = geom.region(c);
                                    element_system<Dim>(
                                        space.active->mesh->cell_vertices(space.active->cells[c]),
                                        space.basis, region.volume_quad, coeff, alpha, load,
                                        mloc[static_cast<size_t>(k)], rloc[static_cast<size_t>(k)]);
                                }
                            });
        // Ordered accumulation keeps the result independent of the thread count.
        for (std::size_t k = 0; k < count; ++k) {
            const auto dofs = space.dofs_of(base + k);
            const auto& em = mloc[k];
            const auto& er = rloc[k];
            for (int i = 0; i < nb; ++i) {
                const std::int64_t row = dofs[static_cast<size_t>(i)];
                sys.rhs[static_cast<size_t>(row)] += er[i];
                const auto rb = sys.matrix.cols.begin() + sys.matrix.row_offsets[static_cast<size_t>(row)];
                const auto re = sys.matrix.cols.begin() + sys.matrix.row_offsets[static_cast<size_t>(row) + 1];
                for (int jj = 0; jj < nb; ++jj) {
                    const auto it = std::lower_bound(rb, re, dofs[static_cast<size_t>(jj)]);
                    sys.matrix.vals[static_cast<size_t>(it - sys.matrix.cols.begin())] += em(i, jj);
                }
            }
        }
    }
    return sys;
}

template <int Dim>
FeSystem<Dim> assemble(const FeSpace<Dim>& space, const Surface<Dim>& surface,
                       CoefficientMode mode, double alpha,
                       const std::function<double(const Vec<Dim>&)>& f,
                       const CutGeometry<Dim>& geom, int threads) {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    CoefficientFn<Dim> coeff = [&surface, mode](const Vec<Dim>& x, Mat<Dim>& a, double& mu) {
        auto [am, m] = surface.coefficient(mode, x);
        a = am;
        mu = m;
    };
    std::function<double(const Vec<Dim>&)> load = [&surface, &f](const Vec<Dim>& x) {
        return f(surface.closest_point(x));
    };
    return assemble_generic(space, geom, coeff, alpha, load, threads);
}

template <int Dim>
std::pair<double, Vec<Dim>> evaluate(const FeSpace<Dim>& space, std::span<const double> coeffs,
                                     std::size_t active_index, const Vec<Dim>& x) {
    const auto vertices = space.active->mesh->cell_vertices(space.active->cells[active_index]);
    Mat<Dim> j;
    for (int k = 0; k < Dim; ++k) j.col(k) = vertices[static_cast<size_t>(k) + 1] - vertices[0];
    const Mat<Dim> jinv = j.inverse();
    const Vec<Dim> xi = jinv * (x - vertices[0]);
    double b0 = 1.0;
    for (int d = 0; d < Dim; ++d) b0 -= xi[d];
    if (xi.minCoeff() < -1e-9 || b0 < -1e-9) {
        throw PointOutsideCell("evaluation point outside the cell");
    }
    const auto dofs = space.dofs_of(active_index);
    double value = 0.0;
    Vec<Dim> grad_ref = Vec<Dim>::Zero();
    for (int i = 0; i < space.basis.count(); ++i) {
        const double ci = coeffs[static_cast<size_t>(dofs[static_cast<size_t>(i)])];
        value += ci * space.basis.value(i, xi);
        grad_ref += ci * space.basis.gradient(i, xi);
    }
    return {value, jinv.transpose() * grad_ref};
}

template <int Dim>
std::vector<double> interpolate(const FeSpace<Dim>& space,
                                const std::function<double(const Vec<Dim>&)>& fn) {
    std::vector<double> coeffs(static_cast<size_t>(space.ndof()));
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = fn(space.dof_coords[i]);
    return coeffs;
}

template struct FeSpace<2>;
template struct FeSpace<3>;
template FeSpace<2> build_space<2>(const ActiveMesh<2>&, int);
template FeSpace<3> build_space<3>(const ActiveMesh<3>&, int);
template void element_system<2>(const std::array<Vec<2>, 3>&, const LagrangeBasis<2>&,
                                const std::vector<VolumePoint<2>>&, const CoefficientFn<2>&,
                                double, const std::function<double(const Vec<2>&)>&,
                                Eigen::MatrixXd&, Eigen::VectorXd&);
template void element_system<3>(const std::array<Vec<3>, 4>&, const LagrangeBasis<3>&,
                                const std::vector<VolumePoint<3>>&, const CoefficientFn<3>&,
                                double, const std::function<double(const Vec<3>&)>&,
                                Eigen::MatrixXd&, Eigen::VectorXd&);
template FeSystem<2> assemble_generic<2>(const FeSpace<2>&, const CutGeometry<2>&,
                                         const CoefficientFn<2>&, double,
                                         const std::function<double(const Vec<2>&)>&, int);
template FeSystem<3> assemble_generic<3>(const FeSpace<3>&, const CutGeometry<3>&,
                                         const CoefficientFn<3>&, double,
                                         const std::function<double(const Vec<3>&)>&, int);
template FeSystem<2> assemble<2>(const FeSpace<2>&, const Surface<2>&, CoefficientMode, double,
                                 const std::function<double(const Vec<2>&)>&, const CutGeometry<2>&,
                                 int);
template FeSystem<3> assemble<3>(const FeSpace<3>&, const Surface<3>&, CoefficientMode, double,
                                 const std::function<double(const Vec<3>&)>&, const CutGeometry<3>&,
                                 int);
template std::pair<double, Vec<2>> evaluate<2>(const FeSpace<2>&, std::span<const double>,
                                               std::size_t, const Vec<2>&);
template std::pair<double, Vec<3>> evaluate<3>(const FeSpace<3>&, std::span<const double>,
                                               std::size_t, const Vec<3>&);
template std::vector<double> interpolate<2>(const FeSpace<2>&,
                                            const std::function<double(const Vec<2>&)>&);
template std::vector<double> interpolate<3>(const FeSpace<3>&,
                                            const std::function<double(const Vec<3>&)>&);

} // namespace nbfem
