#include "nbfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nbfem {

namespace {

// Permutations of (0,1,2) and their parity; each permutation names one
// tetrahedron of the six-fold cube subdivision sharing the main diagonal.
constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
constexpr int kPermSign[6] = {+1, -1, -1, +1, +1, -1};

} // namespace

template <int Dim>
BackgroundMesh<Dim>::BackgroundMesh(const Vec<Dim>& box_min, const Vec<Dim>& box_max, int level,
                                    double h)
    : box_min_(box_min), box_max_(box_max), level_(level), h_(h) {
    if (!(h > 0.0)) throw ConfigError("mesh size h must be positive");
    const double edge = box_max[0] - box_min[0];
    for (int d = 0; d < Dim; ++d) {
        if (std::abs((box_max[d] - box_min[d]) - edge) > 1e-12 * edge) {
            throw ConfigError("background mesh requires a cubic box");
        }
    }
    const double n_real = edge / h;
    n_ = std::llround(n_real);
    if (n_ < 1 || std::abs(n_real - double(n_)) > 1e-9 * n_real) {
        throw ConfigError("box edge is not divisible by the mesh size");
    }
}

template <int Dim>
std::int64_t BackgroundMesh<Dim>::cube_count() const {
    std::int64_t c = 1;
    for (int d = 0; d < Dim; ++d) c *= n_;
    return c;
}

template <>
std::array<std::array<std::int64_t, 2>, 3> BackgroundMesh<2>::cell_vertex_grid(
    std::int64_t cell) const {
    const std::int64_t cube = cell / kSimplicesPerCube;
    const int sub = static_cast<int>(cell % kSimplicesPerCube);
    const std::int64_t cx = cube % n_;
    const std::int64_t cy = cube / n_;
    if (sub == 0) {
        return {{{cx, cy}, {cx + 1, cy}, {cx + 1, cy + 1}}};
    }
    return {{{cx, cy}, {cx + 1, cy + 1}, {cx, cy + 1}}};
}

template <>
std::array<std::array<std::int64_t, 3>, 4> BackgroundMesh<3>::cell_vertex_grid(
    std::int64_t cell) const {
    const std::int64_t cube = cell / kSimplicesPerCube;
    const int sub = static_cast<int>(cell % kSimplicesPerCube);
    const std::int64_t cx = cube % n_;
    const std::int64_t cy = (cube / n_) % n_;
    const std::int64_t cz = cube / (n_ * n_);
    std::array<std::int64_t, 3> v0 = {cx, cy, cz};
    std::array<std::int64_t, 3> v1 = v0;
    v1[kPerm[sub][0]] += 1;
    std::array<std::int64_t, 3> v2 = v1;
    v2[kPerm[sub][1]] += 1;
    std::array<std::int64_t, 3> v3 = {cx + 1, cy + 1, cz + 1};
    if (kPermSign[sub] < 0) std::swap(v1, v2);
    return {v0, v1, v2, v3};
}

template <int Dim>
std::array<Vec<Dim>, Dim + 1> BackgroundMesh<Dim>::cell_vertices(std::int64_t cell) const {
    const auto grid = cell_vertex_grid(cell);
    std::array<Vec<Dim>, Dim + 1> out;
    for (int k = 0; k <= Dim; ++k) out[static_cast<size_t>(k)] = lattice_coord(grid[static_cast<size_t>(k)], 1);
    return out;
}

template <int Dim>
Vec<Dim> BackgroundMesh<Dim>::lattice_coord(const std::array<std::int64_t, Dim>& node,
                                            int order) const {
    const double pitch = h_ / order;
    Vec<Dim> x;
    for (int d = 0; d < Dim; ++d) x[d] = box_min_[d] + double(node[static_cast<size_t>(d)]) * pitch;
    return x;
}

template <int Dim>
std::int64_t BackgroundMesh<Dim>::lattice_id(const std::array<std::int64_t, Dim>& node,
                                             int order) const {
    const std::int64_t stride = n_ * order + 1;
    std::int64_t id = 0;
    for (int d = Dim - 1; d >= 0; --d) id = id * stride + node[static_cast<size_t>(d)];
    return id;
}

template <int Dim>
std::array<std::int64_t, Dim> BackgroundMesh<Dim>::lattice_from_id(std::int64_t id,
                                                                   int order) const {
    const std::int64_t stride = n_ * order + 1;
    std::array<std::int64_t, Dim> node{};
    for (int d = 0; d < Dim; ++d) {
        node[static_cast<size_t>(d)] = id % stride;
        id /= stride;
    }
    return node;
}

template <int Dim>
void BackgroundMesh<Dim>::cell_lattice_nodes(std::int64_t cell, const LagrangeBasis<Dim>& basis,
                                             std::array<std::int64_t, Dim>* out) const {
    const auto grid = cell_vertex_grid(cell);
    for (int i = 0; i < basis.count(); ++i) {
        const auto& a = basis.node(i);
        std::array<std::int64_t, Dim> node{};
        for (int k = 0; k <= Dim; ++k) {
            for (int d = 0; d < Dim; ++d) {
                node[static_cast<size_t>(d)] += std::int64_t(a[static_cast<size_t>(k)]) * grid[static_cast<size_t>(k)][static_cast<size_t>(d)];
            }
        }
        out[i] = node;
    }
}

template <int Dim>
std::pair<std::int64_t, Eigen::Matrix<double, Dim + 1, 1>> BackgroundMesh<Dim>::locate(
    const Vec<Dim>& x) const {
    std::array<std::int64_t, Dim> cube{};
    for (int d = 0; d < Dim; ++d) {
        if (x[d] < box_min_[d] - 1e-12 || x[d] > box_max_[d] + 1e-12) {
            throw PointOutsideCell("point outside the background box");
        }
        cube[static_cast<size_t>(d)] = std::clamp<std::int64_t>(
            std::int64_t(std::floor((x[d] - box_min_[d]) / h_)), 0, n_ - 1);
    }
    std::int64_t cube_id = 0;
    for (int d = Dim - 1; d >= 0; --d) cube_id = cube_id * n_ + cube[static_cast<size_t>(d)];

    std::int64_t best = -1;
    Eigen::Matrix<double, Dim + 1, 1> best_bary;
    double best_min = -1e30;
    for (int sub = 0; sub < kSimplicesPerCube; ++sub) {
        const std::int64_t cell = cube_id * kSimplicesPerCube + sub;
        const auto v = cell_vertices(cell);
        Mat<Dim> j;
        for (int k = 0; k < Dim; ++k) j.col(k) = v[static_cast<size_t>(k) + 1] - v[0];
        const Vec<Dim> xi = j.inverse() * (x - v[0]);
        Eigen::Matrix<double, Dim + 1, 1> bary;
        bary[0] = 1.0;
        for (int d = 0; d < Dim; ++d) {
            bary[d + 1] = xi[d];
            bary[0] -= xi[d];
        }
        const double m = bary.minCoeff();
        if (m > best_min) {
            best_min = m;
            best = cell;
            best_bary = bary;
        }
        if (m >= -1e-12) break;
    }
    if (best_min < -1e-9) throw PointOutsideCell("point not contained in its grid cube");
    return {best, best_bary};
}

template <int Dim>
BackgroundMesh<Dim> build_background_mesh(int level, std::int64_t cell_cap) {
    if (level < 0) throw ConfigError("refinement level must be >= 0");
    const double base = (Dim == 2) ? 0.1 : 0.2;
    const double h = base * std::pow(2.0, -level);
    const double edge = 4.0;
    const double cubes = std::pow(edge / h, Dim);
    if (cubes * BackgroundMesh<Dim>::kSimplicesPerCube > double(cell_cap)) {
        throw ResourceLimit("estimated cell count " +
                            std::to_string(cubes * BackgroundMesh<Dim>::kSimplicesPerCube) +
                            " exceeds the cap " + std::to_string(cell_cap));
    }
    Vec<Dim> lo = Vec<Dim>::Constant(-2.0);
    Vec<Dim> hi = Vec<Dim>::Constant(2.0);
    return BackgroundMesh<Dim>(lo, hi, level, h);
}

template <int Dim>
InterpolatedLevelSet<Dim>::InterpolatedLevelSet(const BackgroundMesh<Dim>& mesh,
                                                std::function<double(const Vec<Dim>&)> phi,
                                                int order)
    : mesh_(&mesh), phi_(std::move(phi)), basis_(order) {}

template <int Dim>
void InterpolatedLevelSet<Dim>::cell_values(std::int64_t cell, std::span<double> out) const {
    std::array<std::array<std::int64_t, Dim>, 10> nodes;
    mesh_->cell_lattice_nodes(cell, basis_, nodes.data());
    for (int i = 0; i < basis_.count(); ++i) {
        out[static_cast<size_t>(i)] = phi_(mesh_->lattice_coord(nodes[static_cast<size_t>(i)], basis_.order()));
    }
}

template <int Dim>
double InterpolatedLevelSet<Dim>::evaluate(std::int64_t cell, const Vec<Dim>& x) const {
    const auto v = mesh_->cell_vertices(cell);
    Mat<Dim> j;
    for (int k = 0; k < Dim; ++k) j.col(k) = v[static_cast<size_t>(k) + 1] - v[0];
    const Vec<Dim> xi = j.inverse() * (x - v[0]);
    std::array<double, 10> vals;
    cell_values(cell, {vals.data(), static_cast<size_t>(basis_.count())});
    double sum = 0.0;
    for (int i = 0; i < basis_.count(); ++i) sum += vals[static_cast<size_t>(i)] * basis_.value(i, xi);
    return sum;
}

double tie_break(double value, double d) {
    if (value == 0.0 || std::abs(value) == d) return value + 1e-12 * d;
    return value;
}

namespace {

// Decides activity and class of one cell from the surrogate nodal values.
struct CellDecision {
    bool active = false;
    CellClass cls = CellClass::Cut;
};

CellDecision classify(std::span<const double> values, double d) {
    bool any_inside = false, all_inside = true, pos = false, neg = false;
    for (double raw : values) {
        const double v = tie_break(raw, d);
        (v > 0 ? pos : neg) = true;
        const bool inside = std::abs(v) < d;
        any_inside |= inside;
        all_inside &= inside;
    }
    CellDecision out;
    out.active = any_inside || (pos && neg);
    out.cls = all_inside ? CellClass::FullyInsideBand : CellClass::Cut;
    return out;
}

} // namespace

template <int Dim>
ActiveMesh<Dim> select_active_cells(const BackgroundMesh<Dim>& mesh,
                                    const InterpolatedLevelSet<Dim>& phi_h, double d,
                                    int subdivision) {
    if (!(d > 0.0)) throw ConfigError("band half-width must be positive");
    const int q = phi_h.order();
    if (Dim == 3 && q != 1) throw Unsupported("geometry order > 1 is 2D-only");
    if (subdivision < 1) throw ConfigError("surrogate subdivision must be >= 1");

    const auto& basis = phi_h.basis();
    const int npc = basis.count();

    // Surrogate sample table: basis values at the principal-lattice nodes of
    // the refined cell (identity for order 1).
    std::vector<std::array<int, 2>> sub_nodes; // (i, j) with i + j <= m, 2D only
    std::vector<double> table;                 // sub_nodes.size() x npc
    const int m = (q == 1) ? 1 : subdivision;
    if (q >= 2) {
        for (int i = 0; i <= m; ++i) {
            for (int jj = 0; jj <= m - i; ++jj) sub_nodes.push_back({i, jj});
        }
        table.resize(sub_nodes.size() * static_cast<size_t>(npc));
        for (size_t s = 0; s < sub_nodes.size(); ++s) {
            Vec<Dim> xi = Vec<Dim>::Zero();
            xi[0] = double(sub_nodes[s][0]) / m;
            xi[1] = double(sub_nodes[s][1]) / m;
            for (int b = 0; b < npc; ++b) table[s * static_cast<size_t>(npc) + static_cast<size_t>(b)] = basis.value(b, xi);
        }
    }

    struct Hit {
        std::int64_t cell;
        CellClass cls;
    };
    std::vector<Hit> hits;
    std::vector<double> hit_values; // npc values per hit

    std::vector<double> cell_vals(static_cast<size_t>(npc));
    std::vector<double> surrogate(sub_nodes.size());

    auto process_cube = [&](const std::array<std::int64_t, Dim>& lo) {
        std::int64_t cube_id = 0;
        for (int dd = Dim - 1; dd >= 0; --dd) cube_id = cube_id * mesh.cubes_per_axis() + lo[static_cast<size_t>(dd)];
        for (int sub = 0; sub < BackgroundMesh<Dim>::kSimplicesPerCube; ++sub) {
            const std::int64_t cell = cube_id * BackgroundMesh<Dim>::kSimplicesPerCube + sub;
            phi_h.cell_values(cell, cell_vals);
            CellDecision dec;
            if (q == 1) {
                dec = classify({cell_vals.data(), static_cast<size_t>(npc)}, d);
            } else {
                for (size_t s = 0; s < sub_nodes.size(); ++s) {
                    double v = 0.0;
                    for (int b = 0; b < npc; ++b) v += table[s * static_cast<size_t>(npc) + static_cast<size_t>(b)] * cell_vals[static_cast<size_t>(b)];
                    surrogate[s] = v;
                }
                dec = classify(surrogate, d);
            }
            if (dec.active) {
                hits.push_back({cell, dec.cls});
                hit_values.insert(hit_values.end(), cell_vals.begin(), cell_vals.end());
            }
        }
    };

    const double margin = mesh.h(); // covers interpolation error of the surrogate
    auto visit = [&](auto&& self, std::array<std::int64_t, Dim> lo,
                     std::array<std::int64_t, Dim> hi) -> void {
        Vec<Dim> center;
        double radius_sq = 0.0;
        int widest = 0;
        for (int dd = 0; dd < Dim; ++dd) {
            if (hi[static_cast<size_t>(dd)] <= lo[static_cast<size_t>(dd)]) return;
            const double half = 0.5 * double(hi[static_cast<size_t>(dd)] - lo[static_cast<size_t>(dd)]) * mesh.h();
            center[dd] = mesh.box_min()[dd] + 0.5 * double(lo[static_cast<size_t>(dd)] + hi[static_cast<size_t>(dd)]) * mesh.h();
            radius_sq += half * half;
            if (hi[static_cast<size_t>(dd)] - lo[static_cast<size_t>(dd)] >
                hi[static_cast<size_t>(widest)] - lo[static_cast<size_t>(widest)]) {
                widest = dd;
            }
        }
        if (std::abs(phi_h.exact(center)) - std::sqrt(radius_sq) > d + margin) return;
        bool leaf = true;
        for (int dd = 0; dd < Dim; ++dd) leaf &= (hi[static_cast<size_t>(dd)] - lo[static_cast<size_t>(dd)] == 1);
        if (leaf) {
            process_cube(lo);
            return;
        }
        auto mid_lo = hi, mid_hi = lo;
        const std::int64_t mid =
            lo[static_cast<size_t>(widest)] + (hi[static_cast<size_t>(widest)] - lo[static_cast<size_t>(widest)]) / 2;
        mid_lo[static_cast<size_t>(widest)] = mid;
        mid_hi[static_cast<size_t>(widest)] = mid;
        self(self, lo, mid_lo);
        self(self, mid_hi, hi);
    };

    std::array<std::int64_t, Dim> lo{}, hi{};
    hi.fill(mesh.cubes_per_axis());
    visit(visit, lo, hi);

    if (hits.empty()) throw EmptyBand("no cell intersects the band; check d and the box");

    std::vector<size_t> order(hits.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return hits[a].cell < hits[b].cell; });

    ActiveMesh<Dim> active;
    active.mesh = &mesh;
    active.geometry_order = q;
    active.subdivision = m;
    active.band_halfwidth = d;
    active.nodes_per_cell = npc;
    active.cells.reserve(hits.size());
    active.classes.reserve(hits.size());
    active.nodal_phi.reserve(hits.size() * static_cast<size_t>(npc));
    for (size_t idx : order) {
        active.cells.push_back(hits[idx].cell);
        active.classes.push_back(hits[idx].cls);
        const double* src = hit_values.data() + idx * static_cast<size_t>(npc);
        active.nodal_phi.insert(active.nodal_phi.end(), src, src + npc);
    }
    return active;
}

template class BackgroundMesh<2>;
template class BackgroundMesh<3>;
template BackgroundMesh<2> build_background_mesh<2>(int, std::int64_t);
template BackgroundMesh<3> build_background_mesh<3>(int, std::int64_t);
template class InterpolatedLevelSet<2>;
template class InterpolatedLevelSet<3>;
template ActiveMesh<2> select_active_cells<2>(const BackgroundMesh<2>&,
                                              const InterpolatedLevelSet<2>&, double, int);
template ActiveMesh<3> select_active_cells<3>(const BackgroundMesh<3>&,
                                              const InterpolatedLevelSet<3>&, double, int);

} // namespace nbfem
