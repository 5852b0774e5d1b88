#include "nbfem/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "nbfem/parallel.hpp"

namespace nbfem {

namespace {

// Ordered reduction over active cells: body fills one slot per cell, the
// final sum runs in cell order regardless of the thread count.
template <typename Body>
std::vector<double> per_cell_sums(std::size_t ncells, int threads, int width, Body&& body) {
    std::vector<double> slots(ncells * static_cast<std::size_t>(width), 0.0);
    parallel_for_chunks(static_cast<std::int64_t>(ncells), threads,
                        [&](std::int64_t lo, std::int64_t hi) {
                            for (std::int64_t c = lo; c < hi; ++c) {
                                body(static_cast<std::size_t>(c),
                                     slots.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(width));
                            }
                        });
    return slots;
}

} // namespace

template <int Dim>
ErrorNorms surface_errors(std::span<const double> solution, const FeSpace<Dim>& space,
                          const CutGeometry<Dim>& geom, const Surface<Dim>& surface,
                          const std::function<double(const Vec<Dim>&)>& u,
                          const std::function<Vec<Dim>(const Vec<Dim>&)>& grad_u, int threads) {
    const std::size_t ncells = space.active->size();
    // slots: l2 part, tangential part, trace-point count
    const auto slots = per_cell_sums(ncells, threads, 3, [&](std::size_t c, double* out) {
        const auto region = geom.region(c);
        if (region.trace_quad.empty()) return;
        double l2 = 0.0, semi = 0.0;
        for (const auto& tp : region.trace_quad) {
            const auto [val, grad] = evaluate<Dim>(space, solution, c, tp.x);
            const Vec<Dim> p = surface.closest_point(tp.x);
            const double phi = surface.signed_distance(tp.x);
            const Mat<Dim> m = Mat<Dim>::Identity() - phi * surface.hessian(tp.x);
            const double mu = m.determinant();
            const Vec<Dim> n = surface.normal(tp.x);
            const Vec<Dim> grad_ue = m * grad_u(p);
            Vec<Dim> terr = grad_ue - grad;
            terr -= n.dot(terr) * n;
            const double e = u(p) - val;
            l2 += tp.w * mu * e * e;
            semi += tp.w * mu * terr.squaredNorm();
        }
        out[0] = l2;
        out[1] = semi;
        out[2] = double(region.trace_quad.size());
    });

    double l2 = 0.0, semi = 0.0, npts = 0.0;
    for (std::size_t c = 0; c < ncells; ++c) {
        l2 += slots[3 * c];
        semi += slots[3 * c + 1];
        npts += slots[3 * c + 2];
    }
    if (npts == 0.0) throw NoTraceCells("the discrete surface missed every active cell");
    ErrorNorms norms;
    norms.l2_gamma = std::sqrt(l2);
    norms.h1_gamma = std::sqrt(l2 + semi);
    return norms;
}

template <int Dim>
double band_h1_error(std::span<const double> solution, const FeSpace<Dim>& space,
                     const CutGeometry<Dim>& geom, const Surface<Dim>& surface,
                     const std::function<double(const Vec<Dim>&)>& u,
                     const std::function<Vec<Dim>(const Vec<Dim>&)>& grad_u, int threads) {
    const std::size_t ncells = space.active->size();
    const auto slots = per_cell_sums(ncells, threads, 1, [&](std::size_t c, double* out) {
        const auto region = geom.region(c);
        double sum = 0.0;
        for (const auto& vp : region.volume_quad) {
            const auto [val, grad] = evaluate<Dim>(space, solution, c, vp.x);
            const Vec<Dim> p = surface.closest_point(vp.x);
            const double phi = surface.signed_distance(vp.x);
            const Mat<Dim> m = Mat<Dim>::Identity() - phi * surface.hessian(vp.x);
            const double e = u(p) - val;
            const Vec<Dim> ge = m * grad_u(p) - grad;
            sum += vp.w * (e * e + ge.squaredNorm());
        }
        out[0] = sum;
    });
    double total = 0.0;
    for (double s : slots) total += s;
    return std::sqrt(total);
}

template <int Dim>
double discrete_surface_measure(const CutGeometry<Dim>& geom, int threads) {
    const std::size_t ncells = geom.active().size();
    const auto slots = per_cell_sums(ncells, threads, 1, [&](std::size_t c, double* out) {
        const auto region = geom.region(c);
        for (const auto& tp : region.trace_quad) out[0] += tp.w;
    });
    double total = 0.0;
    for (double s : slots) total += s;
    return total;
}

template <int Dim>
double band_measure(const CutGeometry<Dim>& geom, int threads) {
    const std::size_t ncells = geom.active().size();
    const auto slots = per_cell_sums(ncells, threads, 1, [&](std::size_t c, double* out) {
        const auto region = geom.region(c);
        for (const auto& vp : region.volume_quad) out[0] += vp.w;
    });
    double total = 0.0;
    for (double s : slots) total += s;
    return total;
}

std::vector<double> compute_eoc(const std::vector<double>& errors, const std::vector<double>& hs) {
    if (errors.size() != hs.size() || errors.size() < 2) {
        throw DimensionMismatch("EOC needs matching error/h sequences of length >= 2");
    }
    for (double e : errors) {
        if (!(e > 0.0)) throw NonPositiveError("EOC requires positive errors");
    }
    for (double h : hs) {
        if (!(h > 0.0)) throw NonPositiveError("EOC requires positive mesh sizes");
    }
    std::vector<double> eoc(errors.size() - 1);
    for (std::size_t k = 1; k < errors.size(); ++k) {
        eoc[k - 1] = std::log(errors[k - 1] / errors[k]) / std::log(hs[k - 1] / hs[k]);
    }
    return eoc;
}

template <int Dim>
void export_vtk(const std::string& path, const ActiveMesh<Dim>& active, const FeSpace<Dim>& space,
                std::span<const double> solution) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    // Unique cell vertices on the grid lattice, in id order.
    std::map<std::int64_t, int> point_index;
    std::vector<std::array<int, Dim + 1>> cells(active.size());
    std::vector<double> phi_at_point;
    std::vector<Vec<Dim>> coords;
    for (std::size_t c = 0; c < active.size(); ++c) {
        const auto grid = active.mesh->cell_vertex_grid(active.cells[c]);
        const auto phis = active.cell_phi(c);
        for (int k = 0; k <= Dim; ++k) {
            const std::int64_t id = active.mesh->lattice_id(grid[static_cast<size_t>(k)], 1);
            auto [it, inserted] = point_index.try_emplace(id, static_cast<int>(point_index.size()));
            if (inserted) {
                coords.push_back(active.mesh->lattice_coord(grid[static_cast<size_t>(k)], 1));
                phi_at_point.push_back(phis[static_cast<size_t>(k)]);
            }
            cells[c][static_cast<size_t>(k)] = it->second;
        }
    }

    char buf[256];
    out << "# vtk DataFile Version 3.0\n";
    out << "narrow band solution\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << coords.size() << " double\n";
    for (const auto& x : coords) {
        if constexpr (Dim == 2) {
            std::snprintf(buf, sizeof buf, "%.15g %.15g 0\n", x[0], x[1]);
        } else {
            std::snprintf(buf, sizeof buf, "%.15g %.15g %.15g\n", x[0], x[1], x[2]);
        }
        out << buf;
    }
    out << "CELLS " << cells.size() << " " << cells.size() * (Dim + 2) << "\n";
    for (const auto& cell : cells) {
        out << (Dim + 1);
        for (int k = 0; k <= Dim; ++k) out << " " << cell[static_cast<size_t>(k)];
        out << "\n";
    }
    out << "CELL_TYPES " << cells.size() << "\n";
    for (std::size_t c = 0; c < cells.size(); ++c) out << (Dim == 2 ? 5 : 10) << "\n";

    out << "POINT_DATA " << coords.size() << "\n";
    out << "SCALARS u_h double 1\nLOOKUP_TABLE default\n";
    for (const auto& [id, idx] : point_index) {
        (void)idx;
        double v = 0.0;
        if (!solution.empty()) {
            // Vertex node on the order-r lattice has coordinates r * grid.
            auto grid = active.mesh->lattice_from_id(id, 1);
            for (auto& g : grid) g *= space.order;
            v = solution[static_cast<size_t>(space.dof_of_lattice(active.mesh->lattice_id(grid, space.order)))];
        }
        std::snprintf(buf, sizeof buf, "%.15g\n", v);
        out << buf;
    }
    out << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < phi_at_point.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.15g\n", phi_at_point[i]);
        out << buf;
    }
    out << "CELL_DATA " << cells.size() << "\n";
    out << "SCALARS cell_class int 1\nLOOKUP_TABLE default\n";
    for (std::size_t c = 0; c < active.size(); ++c) {
        out << (active.classes[c] == CellClass::Cut ? 1 : 0) << "\n";
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

void fill_eoc(std::vector<LevelRow>& rows) {
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double ratio = std::log(rows[k - 1].h / rows[k].h);
        rows[k].eoc_l2 = std::log(rows[k - 1].norms.l2_gamma / rows[k].norms.l2_gamma) / ratio;
        rows[k].eoc_h1 = std::log(rows[k - 1].norms.h1_gamma / rows[k].norms.h1_gamma) / ratio;
        rows[k].has_eoc = true;
    }
}

std::string report_csv(const ConvergenceReport& report) {
    std::string out = "level,h,d,dofs,l2_gamma,eoc_l2,h1_gamma,eoc_h1,h1_band,cg_iters,seconds\n";
    char buf[512];
    for (const auto& r : report.rows) {
        char eoc_l2[32] = "", eoc_h1[32] = "";
        if (r.has_eoc) {
            std::snprintf(eoc_l2, sizeof eoc_l2, "%.4f", r.eoc_l2);
            std::snprintf(eoc_h1, sizeof eoc_h1, "%.4f", r.eoc_h1);
        }
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%lld,%.12e,%s,%.12e,%s,%.12e,%d,%.3f\n",
                      r.level, r.h, r.d, static_cast<long long>(r.dofs), r.norms.l2_gamma, eoc_l2,
                      r.norms.h1_gamma, eoc_h1, r.norms.h1_band, r.stats.iterations, r.seconds);
        out += buf;
    }
    return out;
}

std::string report_markdown(const ConvergenceReport& report) {
    std::string out;
    for (const auto& [k, v] : report.config) out += "# " + k + "=" + v + "\n";
    out += "| level | h | dofs | L2(G) | eoc | H1(G) | eoc | H1(band) | iters | seconds |\n";
    out += "|---|---|---|---|---|---|---|---|---|---|\n";
    char buf[512];
    for (const auto& r : report.rows) {
        char eoc_l2[32] = "    ", eoc_h1[32] = "    ";
        if (r.has_eoc) {
            std::snprintf(eoc_l2, sizeof eoc_l2, "%.2f", r.eoc_l2);
            std::snprintf(eoc_h1, sizeof eoc_h1, "%.2f", r.eoc_h1);
        }
        std::snprintf(buf, sizeof buf,
                      "| %d | %.2e | %lld | %.2e | %s | %.2e | %s | %.2e | %d | %.2f |\n", r.level,
                      r.h, static_cast<long long>(r.dofs), r.norms.l2_gamma, eoc_l2,
                      r.norms.h1_gamma, eoc_h1, r.norms.h1_band, r.stats.iterations, r.seconds);
        out += buf;
    }
    return out;
}

template ErrorNorms surface_errors<2>(std::span<const double>, const FeSpace<2>&,
                                      const CutGeometry<2>&, const Surface<2>&,
                                      const std::function<double(const Vec<2>&)>&,
                                      const std::function<Vec<2>(const Vec<2>&)>&, int);
template ErrorNorms surface_errors<3>(std::span<const double>, const FeSpace<3>&,
                                      const CutGeometry<3>&, const Surface<3>&,
                                      const std::function<double(const Vec<3>&)>&,
                                      const std::function<Vec<3>(const Vec<3>&)>&, int);
template double band_h1_error<2>(std::span<const double>, const FeSpace<2>&, const CutGeometry<2>&,
                                 const Surface<2>&, const std::function<double(const Vec<2>&)>&,
                                 const std::function<Vec<2>(const Vec<2>&)>&, int);
template double band_h1_error<3>(std::span<const double>, const FeSpace<3>&, const CutGeometry<3>&,
                                 const Surface<3>&, const std::function<double(const Vec<3>&)>&,
                                 const std::function<Vec<3>(const Vec<3>&)>&, int);
template double discrete_surface_measure<2>(const CutGeometry<2>&, int);
template double discrete_surface_measure<3>(const CutGeometry<3>&, int);
template double band_measure<2>(const CutGeometry<2>&, int);
template double band_measure<3>(const CutGeometry<3>&, int);
template void export_vtk<2>(const std::string&, const ActiveMesh<2>&, const FeSpace<2>&,
                            std::span<const double>);
template void export_vtk<3>(const std::string&, const ActiveMesh<3>&, const FeSpace<3>&,
                            std::span<const double>);

} // namespace nbfem
