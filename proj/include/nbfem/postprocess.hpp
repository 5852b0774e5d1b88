#pragma once

#include <string>
#include <vector>

#include "nbfem/fem.hpp"

namespace nbfem {

struct ErrorNorms {
    double l2_gamma = 0.0; // L2 over the discrete surface, lifted to the exact one
    double h1_gamma = 0.0; // full norm: L2 part plus tangential semi-norm
    double h1_band = 0.0;  // H1 over the discrete band
};

// Surface norms of u - u_h measured on the zero level of the discrete level
// set. Discrete values come from the owning cell's polynomial; exact data is
// evaluated at the closest point; the area element is corrected by
// mu = det(I - phi H) so integrals represent the exact surface; the
// tangential part applies the exact projector. Throws NoTraceCells when no
// cell carries trace quadrature.
template <int Dim>
ErrorNorms surface_errors(std::span<const double> solution, const FeSpace<Dim>& space,
                          const CutGeometry<Dim>& geom, const Surface<Dim>& surface,
                          const std::function<double(const Vec<Dim>&)>& u,
                          const std::function<Vec<Dim>(const Vec<Dim>&)>& grad_u,
                          int threads = 1);

// H1(band) distance between u_h and the normal extension of u, whose
// gradient is (I - phi H) grad_G u at the closest point.
template <int Dim>
double band_h1_error(std::span<const double> solution, const FeSpace<Dim>& space,
                     const CutGeometry<Dim>& geom, const Surface<Dim>& surface,
                     const std::function<double(const Vec<Dim>&)>& u,
                     const std::function<Vec<Dim>(const Vec<Dim>&)>& grad_u, int threads = 1);

// Total measure of the discrete surface (sum of trace weights).
template <int Dim>
double discrete_surface_measure(const CutGeometry<Dim>& geom, int threads = 1);

// Band measure (sum of volume weights).
template <int Dim>
double band_measure(const CutGeometry<Dim>& geom, int threads = 1);

// eoc_k = log(e_{k-1}/e_k) / log(h_{k-1}/h_k); one entry per refinement
// step. Throws NonPositiveError on non-positive inputs.
std::vector<double> compute_eoc(const std::vector<double>& errors, const std::vector<double>& hs);

// Legacy ASCII unstructured-grid dump of the active cells with point fields
// u_h and phi and the cell classification.
template <int Dim>
void export_vtk(const std::string& path, const ActiveMesh<Dim>& active, const FeSpace<Dim>& space,
                std::span<const double> solution);

struct LevelRow {
    int level = 0;
    double h = 0.0;
    double d = 0.0;
    std::int64_t dofs = 0;
    ErrorNorms norms;
    double eoc_l2 = 0.0; // valid from the second row on
    double eoc_h1 = 0.0;
    bool has_eoc = false;
    SolveStats stats;
    double seconds = 0.0;
    double surface_measure = 0.0;
};

struct ConvergenceReport {
    std::vector<std::pair<std::string, std::string>> config; // effective settings echo
    std::vector<LevelRow> rows;
};

// Fills the EOC columns of a row sequence in place.
void fill_eoc(std::vector<LevelRow>& rows);

// CSV: level,h,d,dofs,l2_gamma,eoc_l2,h1_gamma,eoc_h1,h1_band,cg_iters,seconds
std::string report_csv(const ConvergenceReport& report);

// Table with three significant digits plus the configuration header.
std::string report_markdown(const ConvergenceReport& report);

extern template ErrorNorms surface_errors<2>(std::span<const double>, const FeSpace<2>&,
                                             const CutGeometry<2>&, const Surface<2>&,
                                             const std::function<double(const Vec<2>&)>&,
                                             const std::function<Vec<2>(const Vec<2>&)>&, int);
extern template ErrorNorms surface_errors<3>(std::span<const double>, const FeSpace<3>&,
                                             const CutGeometry<3>&, const Surface<3>&,
                                             const std::function<double(const Vec<3>&)>&,
                                             const std::function<Vec<3>(const Vec<3>&)>&, int);

} // namespace nbfem
