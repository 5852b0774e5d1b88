#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "nbfem/geometry.hpp"

namespace nbfem {

// A manufactured problem: surface, reaction coefficient, exact solution with
// its tangential gradient, and the matching right-hand side, all given as
// functions of surface points.
template <int Dim>
struct Preset {
    std::string name;
    Surface<Dim> surface;
    double alpha = 1.0;
    std::function<double(const Vec<Dim>&)> u;
    std::function<Vec<Dim>(const Vec<Dim>&)> grad_u; // tangential gradient on the surface
    std::function<double(const Vec<Dim>&)> f;
    double default_gamma = 1.0;
    int default_order = 1;
    int geometry_order = 1;
    CoefficientMode default_mode = CoefficientMode::ExactHessian;
};

// u = cos(5 theta) on the unit circle; f = 26 cos(5 theta).
Preset<2> preset_circle();

// u = 12 (3 x1^2 x2 - x2^3) / |x|^3 on the unit sphere; f = 13 u.
Preset<3> preset_sphere();

// u = sin(3 phi) cos(3 theta + phi) on the torus R=1, r=0.6, with the
// matching right-hand side in the angular chart.
Preset<3> preset_torus();

// Circle problem discretized with P2/P3 elements and matching geometry
// order; integration uses the piecewise-linear surrogate on refined cells.
Preset<2> preset_circle_highorder(int r);

// Maximum of |-Lap_G u + alpha u - f| over `samples` random surface points,
// with the surface Laplacian formed by finite differences (arclength stencil
// on the circle, great-circle stencils on the sphere, metric stencil in the
// angular chart on the torus). Guards the preset data against transcription
// slips before any solve.
template <int Dim>
double preset_residual_max(const Preset<Dim>& preset, int samples = 1000,
                           std::uint64_t seed = 20240901);

template <>
double preset_residual_max(const Preset<2>& preset, int samples, std::uint64_t seed);
template <>
double preset_residual_max(const Preset<3>& preset, int samples, std::uint64_t seed);

} // namespace nbfem
