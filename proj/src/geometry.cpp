#include "nbfem/geometry.hpp"

#include <cmath>

namespace nbfem {

namespace {
// Relative slack on the admissibility radius so points that land exactly on
// the band boundary survive roundoff.
constexpr double kBandSlack = 1e-9;
// Guard against evaluations on the medial axis where the projection is
// undefined (e.g. the center of a circle whose radius equals the admissible
// radius).
constexpr double kDegenerate = 1e-12;
} // namespace

CoefficientMode parse_coefficient_mode(const std::string& name) {
    if (name == "exact") return CoefficientMode::ExactHessian;
    if (name == "zero") return CoefficientMode::ZeroHessian;
    throw ConfigError("unknown coefficient mode '" + name + "' (expected exact|zero)");
}

template <int Dim>
void Surface<Dim>::require_in_band(double phi) const {
    if (std::abs(phi) > admissible_radius() * (1.0 + kBandSlack)) {
        throw OutsideBand("point at distance " + std::to_string(phi) +
                          " is outside the admissible band (radius " +
                          std::to_string(admissible_radius()) + ")");
    }
}

template <>
Surface<2> Surface<2>::circle(double radius) {
    if (!(radius > 0.0)) throw ConfigError("circle radius must be positive");
    return Surface<2>(SurfaceKind::Circle, radius, 0.0, 1.0 / radius);
}

template <>
Surface<3> Surface<3>::sphere(double radius) {
    if (!(radius > 0.0)) throw ConfigError("sphere radius must be positive");
    return Surface<3>(SurfaceKind::Sphere, radius, 0.0, 2.0 / radius);
}

template <>
Surface<3> Surface<3>::torus(double major_radius, double minor_radius) {
    if (!(minor_radius > 0.0) || !(major_radius > minor_radius)) {
        throw ConfigError("torus requires 0 < minor < major radius");
    }
    // |k1| + |k2| peaks at the inner equator: 1/r + 1/(R - r).
    const double bound = 1.0 / minor_radius + 1.0 / (major_radius - minor_radius);
    return Surface<3>(SurfaceKind::Torus, major_radius, minor_radius, bound);
}

template <int Dim>
double Surface<Dim>::signed_distance(const Vec<Dim>& x) const {
    switch (kind_) {
    case SurfaceKind::Circle:
    case SurfaceKind::Sphere:
        return x.norm() - radius_;
    case SurfaceKind::Torus: {
        const double rho = std::hypot(x[0], x[1]);
        return std::hypot(rho - radius_, x[2]) - minor_;
    }
    }
    return 0.0;
}

template <int Dim>
Vec<Dim> Surface<Dim>::normal(const Vec<Dim>& x) const {
    const double phi = signed_distance(x);
    require_in_band(phi);
    if (kind_ == SurfaceKind::Torus) {
        const double rho = std::hypot(x[0], x[1]);
        const double s = phi + minor_;
        if (rho < kDegenerate || s < kDegenerate) {
            throw OutsideBand("projection undefined near the torus axis");
        }
        Vec<Dim> n;
        n[0] = (rho - radius_) * x[0] / (rho * s);
        n[1] = (rho - radius_) * x[1] / (rho * s);
        n[2] = x[2] / s;
        return n;
    }
    const double r = x.norm();
    if (r < kDegenerate) throw OutsideBand("projection undefined at the center");
    return x / r;
}

template <int Dim>
Mat<Dim> Surface<Dim>::hessian(const Vec<Dim>& x) const {
    const double phi = signed_distance(x);
    require_in_band(phi);
    if (kind_ == SurfaceKind::Torus) {
        const double rho = std::hypot(x[0], x[1]);
        const double s = phi + minor_;
        if (rho < kDegenerate || s < kDegenerate) {
            throw OutsideBand("Hessian undefined near the torus axis");
        }
        Vec<Dim> u = Vec<Dim>::Zero();
        u[0] = x[0] / rho;
        u[1] = x[1] / rho;
        const Vec<Dim> m = normal(x);
        Mat<Dim> h = Mat<Dim>::Identity();
        h(2, 2) = 0.0;                       // in-plane identity
        h *= (rho - radius_) / rho;
        h(2, 2) = 1.0;
        h += (radius_ / rho) * (u * u.transpose());
        h -= m * m.transpose();
        return h / s;
    }
    const double r = x.norm();
    if (r < kDegenerate) throw OutsideBand("Hessian undefined at the center");
    const Vec<Dim> n = x / r;
    return (Mat<Dim>::Identity() - n * n.transpose()) / r;
}

template <int Dim>
Vec<Dim> Surface<Dim>::closest_point(const Vec<Dim>& x) const {
    const double phi = signed_distance(x);
    require_in_band(phi);
    if (kind_ == SurfaceKind::Torus) {
        const double rho = std::hypot(x[0], x[1]);
        const double s = phi + minor_;
        if (rho < kDegenerate || s < kDegenerate) {
            throw OutsideBand("projection undefined near the torus axis");
        }
        Vec<Dim> c;
        c[0] = radius_ * x[0] / rho;
        c[1] = radius_ * x[1] / rho;
        c[2] = 0.0;
        return c + (minor_ / s) * (x - c);
    }
    const double r = x.norm();
    if (r < kDegenerate) throw OutsideBand("projection undefined at the center");
    return (radius_ / r) * x;
}

template <int Dim>
std::pair<Mat<Dim>, double> Surface<Dim>::coefficient(CoefficientMode mode,
                                                      const Vec<Dim>& x) const {
    if (mode == CoefficientMode::ZeroHessian) {
        return {Mat<Dim>::Identity(), 1.0};
    }
    const double phi = signed_distance(x);
    require_in_band(phi);
    const Mat<Dim> m = Mat<Dim>::Identity() - phi * hessian(x);
    const double mu = m.determinant();
    if (!(mu > kDegenerate)) {
        throw SingularMatrix("I - phi*H is singular at distance " + std::to_string(phi));
    }
    const Mat<Dim> inv = m.inverse();
    return {mu * (inv * inv), mu};
}

template <int Dim>
bool Surface<Dim>::band_admissible(double d) const {
    return d > 0.0 && d * curvature_bound_ <= 0.5 * (1.0 + kBandSlack);
}

template class Surface<2>;
template class Surface<3>;

} // namespace nbfem
