#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>

#include "nbfem/errors.hpp"

namespace nbfem {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;
template <int Dim>
using Mat = Eigen::Matrix<double, Dim, Dim>;

enum class SurfaceKind { Circle, Sphere, Torus };

// How the diffusion tensor of the extended equation is formed: from the exact
// distance Hessian, or dropped entirely (identity tensor, unit weight).
enum class CoefficientMode { ExactHessian, ZeroHessian };

CoefficientMode parse_coefficient_mode(const std::string& name);

// Analytic signed-distance description of one closed surface. All pointwise
// quantities (normal, Hessian, closest point, band coefficient) are exact;
// no iteration is involved for any built-in shape.
//
// Instances are immutable values and safe to share across threads.
template <int Dim>
class Surface {
public:
    static Surface circle(double radius);                          // Dim == 2
    static Surface sphere(double radius);                          // Dim == 3
    static Surface torus(double major_radius, double minor_radius); // Dim == 3

    SurfaceKind kind() const { return kind_; }

    // Max over the surface of |k1| + |k2| (principal curvatures).
    double curvature_bound() const { return curvature_bound_; }

    // Largest |phi| for which the closest-point decomposition is unique.
    double admissible_radius() const { return 1.0 / curvature_bound_; }

    // Exact signed distance; negative inside, total in space.
    double signed_distance(const Vec<Dim>& x) const;

    // Unit gradient of the distance. Throws OutsideBand beyond the
    // admissible radius (with a small relative slack for roundoff).
    Vec<Dim> normal(const Vec<Dim>& x) const;

    // Distance Hessian; symmetric, annihilates the normal.
    Mat<Dim> hessian(const Vec<Dim>& x) const;

    // Foot point x - phi(x) * normal(x) on the surface.
    Vec<Dim> closest_point(const Vec<Dim>& x) const;

    // Extension of a surface function constant along normals.
    double normal_extend(const std::function<double(const Vec<Dim>&)>& g,
                         const Vec<Dim>& x) const {
        return g(closest_point(x));
    }

    // Diffusion tensor A = mu * (I - phi H)^-2 and weight mu = det(I - phi H)
    // of the extended equation; (I, 1) in ZeroHessian mode.
    std::pair<Mat<Dim>, double> coefficient(CoefficientMode mode, const Vec<Dim>& x) const;

    // True iff a band of half-width d keeps the coefficient uniformly
    // elliptic: d * curvature_bound <= 1/2.
    bool band_admissible(double d) const;

private:
    Surface(SurfaceKind kind, double a, double b, double curvature_bound)
        : kind_(kind), radius_(a), minor_(b), curvature_bound_(curvature_bound) {}

    void require_in_band(double phi) const;

    SurfaceKind kind_;
    double radius_; // circle/sphere radius, or torus major radius
    double minor_;  // torus minor radius (unused otherwise)
    double curvature_bound_;
};

// Narrow-band width d = gamma * h. Construction rejects bands that violate
// the curvature admissibility condition.
struct BandSpec {
    double gamma = 1.0;
    double d = 0.0;

    template <int Dim>
    static BandSpec make(const Surface<Dim>& surface, double gamma, double h);
};

template <int Dim>
BandSpec BandSpec::make(const Surface<Dim>& surface, double gamma, double h) {
    if (!(gamma > 0.0)) throw ConfigError("band factor gamma must be positive");
    const double d = gamma * h;
    if (!surface.band_admissible(d)) {
        throw ConfigError(
            "band half-width d=" + std::to_string(d) +
            " violates d * K <= 1/2 for curvature bound K=" +
            std::to_string(surface.curvature_bound()) +
            " (max admissible d=" + std::to_string(0.5 / surface.curvature_bound()) + ")");
    }
    return BandSpec{gamma, d};
}

extern template class Surface<2>;
extern template class Surface<3>;

} // namespace nbfem
