#pragma once

#include <vector>

#include "nbfem/geometry.hpp"

namespace nbfem {

// Point/weight on [0, 1]; weights sum to 1.
struct Quad1D {
    double t;
    double w;
};

// Gauss-Legendre rule with `points` nodes mapped to [0, 1]; exact for
// polynomials of degree 2*points - 1. Supports 1..6 points.
std::vector<Quad1D> gauss_legendre_01(int points);

template <int Dim>
struct RefQuadPoint {
    Vec<Dim> xi;
    double w;
};

// Quadrature on the reference simplex {xi_i >= 0, sum xi <= 1}, exact for
// polynomials up to `degree`. Built as a collapsed tensor product of
// Gauss-Legendre rules, so exactness holds for every requested degree.
// Weights sum to the reference volume (1/2 in 2D, 1/6 in 3D).
template <int Dim>
std::vector<RefQuadPoint<Dim>> reference_simplex_rule(int degree);

template <>
std::vector<RefQuadPoint<2>> reference_simplex_rule<2>(int degree);
template <>
std::vector<RefQuadPoint<3>> reference_simplex_rule<3>(int degree);

} // namespace nbfem
