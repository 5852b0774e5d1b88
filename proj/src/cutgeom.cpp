#include "nbfem/cutgeom.hpp"

#include <algorithm>
#include <cmath>

namespace nbfem {

namespace {

template <int Dim>
double signed_measure(const std::array<Vec<Dim>, Dim + 1>& v) {
    Mat<Dim> j;
    for (int k = 0; k < Dim; ++k) j.col(k) = v[static_cast<size_t>(k) + 1] - v[0];
    double f = 1.0;
    for (int k = 2; k <= Dim; ++k) f *= k;
    return j.determinant() / f;
}

template <int Dim>
void push_oriented(Simplex<Dim> s, std::vector<Simplex<Dim>>& out) {
    const double m = signed_measure<Dim>(s.v);
    if (std::isnan(m)) throw DegenerateCut("NaN sub-simplex measure");
    if (m == 0.0) return; // exact sliver, contributes nothing
    if (m < 0.0) {
        std::swap(s.v[1], s.v[2]);
        std::swap(s.phi[1], s.phi[2]);
    }
    out.push_back(s);
}

template <int Dim>
Vec<Dim> edge_cut(const Simplex<Dim>& s, int i, int j, double g_i, double g_j, double t) {
    const double ratio = (t - g_i) / (g_j - g_i);
    return s.v[static_cast<size_t>(i)] + ratio * (s.v[static_cast<size_t>(j)] - s.v[static_cast<size_t>(i)]);
}

// Keeps the part of the simplex where sign * phi <= t. New vertices carry
// the boundary value phi = sign * t.
template <int Dim>
void clip_half(const Simplex<Dim>& s, double sign, double t, std::vector<Simplex<Dim>>& out) {
    std::array<double, Dim + 1> g;
    int in[Dim + 1], ex[Dim + 1];
    int nin = 0, nex = 0;
    for (int k = 0; k <= Dim; ++k) {
        g[static_cast<size_t>(k)] = sign * s.phi[static_cast<size_t>(k)];
        if (g[static_cast<size_t>(k)] <= t) {
            in[nin++] = k;
        } else {
            ex[nex++] = k;
        }
    }
    if (nin == 0) return;
    if (nex == 0) {
        out.push_back(s);
        return;
    }
    const double tphi = sign * t;
    auto cut = [&](int i, int j) {
        return edge_cut<Dim>(s, i, j, g[static_cast<size_t>(i)], g[static_cast<size_t>(j)], t);
    };

    if constexpr (Dim == 2) {
        if (nin == 1) {
            const int a = in[0];
            push_oriented<Dim>({{s.v[static_cast<size_t>(a)], cut(a, ex[0]), cut(a, ex[1])},
                                {s.phi[static_cast<size_t>(a)], tphi, tphi}},
                               out);
        } else { // nin == 2: quad fanned from the first kept vertex
            const int a = in[0], b = in[1], c = ex[0];
            const Vec<Dim> pbc = cut(b, c), pac = cut(a, c);
            push_oriented<Dim>({{s.v[static_cast<size_t>(a)], s.v[static_cast<size_t>(b)], pbc},
                                {s.phi[static_cast<size_t>(a)], s.phi[static_cast<size_t>(b)], tphi}},
                               out);
            push_oriented<Dim>({{s.v[static_cast<size_t>(a)], pbc, pac},
                                {s.phi[static_cast<size_t>(a)], tphi, tphi}},
                               out);
        }
    } else {
        if (nin == 1) {
            const int a = in[0];
            push_oriented<Dim>(
                {{s.v[static_cast<size_t>(a)], cut(a, ex[0]), cut(a, ex[1]), cut(a, ex[2])},
                 {s.phi[static_cast<size_t>(a)], tphi, tphi, tphi}},
                out);
        } else if (nin == 3) {
            // Frustum between face (a,b,c) and the cut triangle toward d.
            const int a = in[0], b = in[1], c = in[2], dd = ex[0];
            const Vec<Dim> pa = cut(a, dd), pb = cut(b, dd), pc = cut(c, dd);
            const double fa = s.phi[static_cast<size_t>(a)], fb = s.phi[static_cast<size_t>(b)],
                         fc = s.phi[static_cast<size_t>(c)];
            push_oriented<Dim>({{s.v[static_cast<size_t>(a)], s.v[static_cast<size_t>(b)], s.v[static_cast<size_t>(c)], pa},
                                {fa, fb, fc, tphi}},
                               out);
            push_oriented<Dim>({{s.v[static_cast<size_t>(b)], s.v[static_cast<size_t>(c)], pa, pb},
                                {fb, fc, tphi, tphi}},
                               out);
            push_oriented<Dim>({{s.v[static_cast<size_t>(c)], pa, pb, pc}, {fc, tphi, tphi, tphi}},
                               out);
        } else { // nin == 2: wedge fanned from the first kept vertex
            const int a = in[0], b = in[1], c = ex[0], dd = ex[1];
            const Vec<Dim> pac = cut(a, c), pad = cut(a, dd), pbc = cut(b, c), pbd = cut(b, dd);
            const double fa = s.phi[static_cast<size_t>(a)], fb = s.phi[static_cast<size_t>(b)];
            push_oriented<Dim>({{s.v[static_cast<size_t>(a)], s.v[static_cast<size_t>(b)], pbc, pbd},
                                {fa, fb, tphi, tphi}},
                               out);
            push_oriented<Dim>({{s.v[static_cast<size_t>(a)], pac, pbc, pbd}, {fa, tphi, tphi, tphi}},
                               out);
            push_oriented<Dim>({{s.v[static_cast<size_t>(a)], pac, pbd, pad}, {fa, tphi, tphi, tphi}},
                               out);
        }
    }
}

} // namespace

template <int Dim>
double simplex_measure(const Simplex<Dim>& s) {
    return std::abs(signed_measure<Dim>(s.v));
}

template <int Dim>
std::vector<Simplex<Dim>> clip_cell(const Simplex<Dim>& cell, double d) {
    if (!(d > 0.0)) throw ConfigError("band half-width must be positive");
    std::vector<Simplex<Dim>> below;
    clip_half<Dim>(cell, +1.0, d, below);
    std::vector<Simplex<Dim>> band;
    for (const auto& s : below) clip_half<Dim>(s, -1.0, d, band);
    return band;
}

template <int Dim>
std::vector<VolumePoint<Dim>> volume_quadrature(const std::vector<Simplex<Dim>>& sub_simplices,
                                                int degree) {
    if (degree < 1 || degree > 6) {
        throw UnsupportedDegree("volume quadrature degree must be in [1, 6], got " +
                                std::to_string(degree));
    }
    const auto rule = reference_simplex_rule<Dim>(degree);
    std::vector<VolumePoint<Dim>> out;
    out.reserve(rule.size() * sub_simplices.size());
    for (const auto& s : sub_simplices) {
        Mat<Dim> j;
        for (int k = 0; k < Dim; ++k) j.col(k) = s.v[static_cast<size_t>(k) + 1] - s.v[0];
        const double adet = std::abs(j.determinant());
        for (const auto& q : rule) {
            out.push_back({s.v[0] + j * q.xi, q.w * adet});
        }
    }
    return out;
}

namespace {

template <int Dim>
Vec<Dim> linear_gradient(const Simplex<Dim>& s) {
    Mat<Dim> j;
    Vec<Dim> dphi;
    for (int k = 0; k < Dim; ++k) {
        j.col(k) = s.v[static_cast<size_t>(k) + 1] - s.v[0];
        dphi[k] = s.phi[static_cast<size_t>(k) + 1] - s.phi[0];
    }
    return j.transpose().inverse() * dphi;
}

} // namespace

template <>
std::vector<TracePoint<2>> trace_quadrature(const Simplex<2>& cell, int degree) {
    int pos = 0, neg = 0;
    for (double v : cell.phi) (v > 0.0 ? pos : neg) += 1;
    if (pos == 0 || neg == 0) throw NoIntersection("level set has uniform sign on the cell");

    std::array<Vec<2>, 2> p;
    int np = 0;
    for (int i = 0; i <= 2; ++i) {
        for (int j = i + 1; j <= 2; ++j) {
            if (cell.phi[static_cast<size_t>(i)] * cell.phi[static_cast<size_t>(j)] < 0.0) {
                p[static_cast<size_t>(np++)] =
                    edge_cut<2>(cell, i, j, cell.phi[static_cast<size_t>(i)], cell.phi[static_cast<size_t>(j)], 0.0);
            }
        }
    }
    if (np != 2) throw DegenerateCut("expected exactly two zero crossings on a triangle");

    Vec<2> g = linear_gradient(cell);
    const double gn = g.norm();
    if (!(gn > 0.0)) throw DegenerateCut("vanishing level-set gradient on a cut cell");
    g /= gn;

    const double len = (p[1] - p[0]).norm();
    const int npts = std::clamp((degree + 2) / 2, 1, 6);
    const auto line = gauss_legendre_01(npts);
    std::vector<TracePoint<2>> out;
    out.reserve(line.size());
    for (const auto& [t, w] : line) {
        out.push_back({p[0] + t * (p[1] - p[0]), w * len, g});
    }
    return out;
}

template <>
std::vector<TracePoint<3>> trace_quadrature(const Simplex<3>& cell, int degree) {
    int in[4], ex[4];
    int nin = 0, nex = 0;
    for (int k = 0; k <= 3; ++k) {
        if (cell.phi[static_cast<size_t>(k)] < 0.0) {
            in[nin++] = k;
        } else if (cell.phi[static_cast<size_t>(k)] > 0.0) {
            ex[nex++] = k;
        } else {
            ex[nex++] = k; // zero treated as outside; unreachable after tie-break
        }
    }
    if (nin == 0 || nex == 0) throw NoIntersection("level set has uniform sign on the cell");

    auto zero_cut = [&](int i, int j) {
        return edge_cut<3>(cell, i, j, cell.phi[static_cast<size_t>(i)], cell.phi[static_cast<size_t>(j)], 0.0);
    };

    std::vector<std::array<Vec<3>, 3>> facets;
    if (nin == 1 || nex == 1) {
        const int lone = (nin == 1) ? in[0] : ex[0];
        const int* other = (nin == 1) ? ex : in;
        facets.push_back({zero_cut(lone, other[0]), zero_cut(lone, other[1]), zero_cut(lone, other[2])});
    } else {
        // Planar quad ordered so consecutive corners share a tetra face.
        const int a = in[0], b = in[1], c = ex[0], dd = ex[1];
        const Vec<3> pac = zero_cut(a, c), pbc = zero_cut(b, c), pbd = zero_cut(b, dd),
                     pad = zero_cut(a, dd);
        facets.push_back({pac, pbc, pbd});
        facets.push_back({pac, pbd, pad});
    }

    Vec<3> g = linear_gradient(cell);
    const double gn = g.norm();
    if (!(gn > 0.0)) throw DegenerateCut("vanishing level-set gradient on a cut cell");
    g /= gn;

    const auto rule = reference_simplex_rule<2>(std::max(degree, 1));
    std::vector<TracePoint<3>> out;
    out.reserve(rule.size() * facets.size());
    for (const auto& f : facets) {
        const Vec<3> e1 = f[1] - f[0];
        const Vec<3> e2 = f[2] - f[0];
        const double scale = e1.cross(e2).norm(); // 2x facet area
        if (std::isnan(scale)) throw DegenerateCut("NaN facet area");
        for (const auto& q : rule) {
            out.push_back({f[0] + q.xi[0] * e1 + q.xi[1] * e2, q.w * scale, g});
        }
    }
    return out;
}

template <int Dim>
SubTriangulation<Dim> subtriangulate(const InterpolatedLevelSet<Dim>& phi_h, std::int64_t cell,
                                     int m, std::int64_t cell_cap) {
    static_assert(Dim == 2, "sub-triangulated integration is 2D-only");
    if (m < 1) throw ConfigError("subdivision must be >= 1");
    if (std::int64_t(m) * m > cell_cap) {
        throw ResourceLimit("sub-triangulation with " + std::to_string(std::int64_t(m) * m) +
                            " cells exceeds the cap");
    }
    const auto& basis = phi_h.basis();
    std::vector<double> nodal(static_cast<size_t>(basis.count()));
    phi_h.cell_values(cell, nodal);

    SubTriangulation<Dim> sub;
    sub.cell = cell;
    sub.m = m;
    sub.node_phi.reserve(static_cast<size_t>((m + 1) * (m + 2) / 2));
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= m - i; ++j) {
            Vec<Dim> xi;
            xi[0] = double(i) / m;
            xi[1] = double(j) / m;
            double v = 0.0;
            for (int b = 0; b < basis.count(); ++b) v += nodal[static_cast<size_t>(b)] * basis.value(b, xi);
            sub.node_phi.push_back(v);
        }
    }
    return sub;
}

template <int Dim>
CutGeometry<Dim>::CutGeometry(const ActiveMesh<Dim>& active, int volume_degree, int trace_degree)
    : active_(&active), volume_degree_(volume_degree), trace_degree_(trace_degree) {
    if (volume_degree < 1 || volume_degree > 6) {
        throw UnsupportedDegree("volume quadrature degree must be in [1, 6]");
    }
    volume_rule_ = reference_simplex_rule<Dim>(volume_degree);

    if (active.geometry_order >= 2) {
        if constexpr (Dim != 2) throw Unsupported("geometry order > 1 is 2D-only");
        const int m = active.subdivision;
        const LagrangeBasis<Dim> basis(active.geometry_order);
        auto node_index = [m](int i, int j) {
            // Row-major over i with shrinking rows: offset of row i is
            // i*(m+1) - i*(i-1)/2.
            return i * (m + 1) - i * (i - 1) / 2 + j;
        };
        for (int i = 0; i <= m; ++i) {
            for (int j = 0; j <= m - i; ++j) {
                sub_nodes_.push_back({i, j});
                Vec<Dim> xi = Vec<Dim>::Zero();
                xi[0] = double(i) / m;
                xi[1] = double(j) / m;
                for (int b = 0; b < basis.count(); ++b) sub_table_.push_back(basis.value(b, xi));
            }
        }
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m - i; ++j) {
                sub_cells_.push_back({node_index(i, j), node_index(i + 1, j), node_index(i, j + 1)});
                if (i + j < m - 1) {
                    sub_cells_.push_back(
                        {node_index(i + 1, j), node_index(i + 1, j + 1), node_index(i, j + 1)});
                }
            }
        }
    }
}

template <int Dim>
CutRegion<Dim> CutGeometry<Dim>::region(std::size_t active_index) const {
    const ActiveMesh<Dim>& act = *active_;
    const std::int64_t cell = act.cells[active_index];
    const auto vertices = act.mesh->cell_vertices(cell);
    const double d = act.band_halfwidth;
    const auto nodal = act.cell_phi(active_index);

    CutRegion<Dim> r;
    r.cell = cell;

    auto map_volume_rule = [&](const Simplex<Dim>& s) {
        Mat<Dim> j;
        for (int k = 0; k < Dim; ++k) j.col(k) = s.v[static_cast<size_t>(k) + 1] - s.v[0];
        const double adet = std::abs(j.determinant());
        for (const auto& q : volume_rule_) r.volume_quad.push_back({s.v[0] + j * q.xi, q.w * adet});
    };

    if (act.geometry_order == 1) {
        Simplex<Dim> s;
        s.v = vertices;
        bool pos = false, neg = false;
        for (int k = 0; k <= Dim; ++k) {
            s.phi[static_cast<size_t>(k)] = tie_break(nodal[static_cast<size_t>(k)], d);
            (s.phi[static_cast<size_t>(k)] > 0.0 ? pos : neg) = true;
        }
        r.sub_simplices = (act.classes[active_index] == CellClass::FullyInsideBand)
                              ? std::vector<Simplex<Dim>>{s}
                              : clip_cell(s, d);
        for (const auto& sub : r.sub_simplices) map_volume_rule(sub);
        if (pos && neg) r.trace_quad = trace_quadrature<Dim>(s, trace_degree_);
        return r;
    }

    if constexpr (Dim == 2) {
        // Surrogate values at the sub-lattice nodes.
        const size_t nn = sub_nodes_.size();
        const int npc = act.nodes_per_cell;
        std::vector<double> vals(nn);
        for (size_t s = 0; s < nn; ++s) {
            double v = 0.0;
            for (int b = 0; b < npc; ++b) v += sub_table_[s * static_cast<size_t>(npc) + static_cast<size_t>(b)] * nodal[static_cast<size_t>(b)];
            vals[s] = tie_break(v, d);
        }
        const int m = act.subdivision;
        Mat<Dim> jc;
        for (int k = 0; k < Dim; ++k) jc.col(k) = vertices[static_cast<size_t>(k) + 1] - vertices[0];

        auto sub_simplex = [&](const std::array<int, 3>& tri) {
            Simplex<Dim> s;
            for (int k = 0; k < 3; ++k) {
                const auto& nij = sub_nodes_[static_cast<size_t>(tri[static_cast<size_t>(k)])];
                Vec<Dim> xi;
                xi[0] = double(nij[0]) / m;
                xi[1] = double(nij[1]) / m;
                s.v[static_cast<size_t>(k)] = vertices[0] + jc * xi;
                s.phi[static_cast<size_t>(k)] = vals[static_cast<size_t>(tri[static_cast<size_t>(k)])];
            }
            return s;
        };

        const bool whole_cell = act.classes[active_index] == CellClass::FullyInsideBand;
        if (whole_cell) {
            Simplex<Dim> s;
            s.v = vertices;
            for (int k = 0; k <= Dim; ++k) s.phi[static_cast<size_t>(k)] = tie_break(nodal[static_cast<size_t>(k)], d);
            r.sub_simplices.push_back(s);
            map_volume_rule(s);
        }
        for (const auto& tri : sub_cells_) {
            bool pos = false, neg = false, all_in = true, any_reach = false;
            for (int k = 0; k < 3; ++k) {
                const double v = vals[static_cast<size_t>(tri[static_cast<size_t>(k)])];
                (v > 0.0 ? pos : neg) = true;
                const bool inside = std::abs(v) < d;
                all_in &= inside;
                any_reach |= inside;
            }
            if (!whole_cell) {
                if (all_in) {
                    const Simplex<Dim> s = sub_simplex(tri);
                    r.sub_simplices.push_back(s);
                    map_volume_rule(s);
                } else if (any_reach || (pos && neg)) {
                    const Simplex<Dim> s = sub_simplex(tri);
                    auto parts = clip_cell(s, d);
                    for (const auto& p : parts) map_volume_rule(p);
                    r.sub_simplices.insert(r.sub_simplices.end(), parts.begin(), parts.end());
                }
            }
            if (pos && neg) {
                const auto tq = trace_quadrature<Dim>(sub_simplex(tri), trace_degree_);
                r.trace_quad.insert(r.trace_quad.end(), tq.begin(), tq.end());
            }
        }
    }
    return r;
}

template double simplex_measure<2>(const Simplex<2>&);
template double simplex_measure<3>(const Simplex<3>&);
template std::vector<Simplex<2>> clip_cell<2>(const Simplex<2>&, double);
template std::vector<Simplex<3>> clip_cell<3>(const Simplex<3>&, double);
template std::vector<VolumePoint<2>> volume_quadrature<2>(const std::vector<Simplex<2>>&, int);
template std::vector<VolumePoint<3>> volume_quadrature<3>(const std::vector<Simplex<3>>&, int);
template SubTriangulation<2> subtriangulate<2>(const InterpolatedLevelSet<2>&, std::int64_t, int,
                                               std::int64_t);
template class CutGeometry<2>;
template class CutGeometry<3>;

} // namespace nbfem
