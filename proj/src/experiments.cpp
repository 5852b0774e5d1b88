#include "nbfem/experiments.hpp"

#include <cmath>
#include <random>

namespace nbfem {

namespace {

constexpr double kTorusMajor = 1.0;
constexpr double kTorusMinor = 0.6;

struct TorusAngles {
    double cos_p, sin_p; // azimuth
    double cos_t, sin_t; // tube angle
};

TorusAngles torus_angles(const Vec<3>& x) {
    const double rho = std::hypot(x[0], x[1]);
    const double s = std::hypot(rho - kTorusMajor, x[2]);
    TorusAngles a;
    a.cos_p = x[0] / rho;
    a.sin_p = x[1] / rho;
    a.cos_t = (rho - kTorusMajor) / s;
    a.sin_t = x[2] / s;
    return a;
}

double torus_u_angles(double phi, double theta) {
    return std::sin(3.0 * phi) * std::cos(3.0 * theta + phi);
}

double torus_f_angles(double phi, double theta) {
    const double r = kTorusMinor;
    const double big = kTorusMajor + r * std::cos(theta);
    const double sp = std::sin(3.0 * phi), cp = std::cos(3.0 * phi);
    const double sq = std::sin(3.0 * theta + phi), cq = std::cos(3.0 * theta + phi);
    return (9.0 * sp * cq) / (r * r) + (10.0 * sp * cq + 6.0 * cp * sq) / (big * big) -
           (3.0 * std::sin(theta) * sp * sq) / (r * big) + sp * cq;
}

} // namespace

Preset<2> preset_circle() {
    Preset<2> p;
    p.name = "circle";
    p.surface = Surface<2>::circle(1.0);
    p.alpha = 1.0;
    p.u = [](const Vec<2>& x) { return std::cos(5.0 * std::atan2(x[1], x[0])); };
    p.grad_u = [](const Vec<2>& x) {
        const double theta = std::atan2(x[1], x[0]);
        Vec<2> t;
        t[0] = -std::sin(theta);
        t[1] = std::cos(theta);
        return Vec<2>(-5.0 * std::sin(5.0 * theta) * t);
    };
    p.f = [](const Vec<2>& x) { return 26.0 * std::cos(5.0 * std::atan2(x[1], x[0])); };
    p.default_gamma = 5.0;
    p.default_order = 1;
    p.geometry_order = 1;
    return p;
}

Preset<3> preset_sphere() {
    Preset<3> p;
    p.name = "sphere";
    p.surface = Surface<3>::sphere(1.0);
    p.alpha = 1.0;
    auto g = [](const Vec<3>& x) { return 3.0 * x[0] * x[0] * x[1] - x[1] * x[1] * x[1]; };
    p.u = [g](const Vec<3>& x) {
        const double r = x.norm();
        return 12.0 * g(x) / (r * r * r);
    };
    p.grad_u = [g](const Vec<3>& x) {
        // Homogeneous of degree zero, so the ambient gradient is tangential
        // on the unit sphere.
        const Vec<3> n = x / x.norm();
        Vec<3> dg;
        dg[0] = 6.0 * x[0] * x[1];
        dg[1] = 3.0 * x[0] * x[0] - 3.0 * x[1] * x[1];
        dg[2] = 0.0;
        return Vec<3>(12.0 * (dg - 3.0 * g(x) * n));
    };
    p.f = [p_u = p.u](const Vec<3>& x) { return 13.0 * p_u(x); };
    p.default_gamma = 1.0;
    p.default_order = 1;
    p.geometry_order = 1;
    return p;
}

Preset<3> preset_torus() {
    Preset<3> p;
    p.name = "torus";
    p.surface = Surface<3>::torus(kTorusMajor, kTorusMinor);
    p.alpha = 1.0;
    p.u = [](const Vec<3>& x) {
        const auto a = torus_angles(x);
        return torus_u_angles(std::atan2(a.sin_p, a.cos_p), std::atan2(a.sin_t, a.cos_t));
    };
    p.f = [](const Vec<3>& x) {
        const auto a = torus_angles(x);
        return torus_f_angles(std::atan2(a.sin_p, a.cos_p), std::atan2(a.sin_t, a.cos_t));
    };
    p.grad_u = [](const Vec<3>& x) {
        const auto a = torus_angles(x);
        const double phi = std::atan2(a.sin_p, a.cos_p);
        const double theta = std::atan2(a.sin_t, a.cos_t);
        const double sp = std::sin(3.0 * phi), cp = std::cos(3.0 * phi);
        const double sq = std::sin(3.0 * theta + phi), cq = std::cos(3.0 * theta + phi);
        const double du_dphi = 3.0 * cp * cq - sp * sq;
        const double du_dtheta = -3.0 * sp * sq;
        const double big = kTorusMajor + kTorusMinor * a.cos_t;
        Vec<3> e_phi, e_theta;
        e_phi << -a.sin_p, a.cos_p, 0.0;
        e_theta << -a.cos_p * a.sin_t, -a.sin_p * a.sin_t, a.cos_t;
        return Vec<3>((du_dphi / big) * e_phi + (du_dtheta / kTorusMinor) * e_theta);
    };
    p.default_gamma = 1.0;
    p.default_order = 1;
    p.geometry_order = 1;
    return p;
}

Preset<2> preset_circle_highorder(int r) {
    if (r != 2 && r != 3) throw Unsupported("high-order circle preset requires r in {2, 3}");
    Preset<2> p = preset_circle();
    p.name = "circle-p" + std::to_string(r);
    p.default_gamma = 3.0;
    p.default_order = r;
    p.geometry_order = r;
    p.default_mode = CoefficientMode::ExactHessian;
    return p;
}

template <>
double preset_residual_max(const Preset<2>& preset, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    // Five-point arclength stencil in extended precision; plain double would
    // leave too little headroom under the 1e-10 gate.
    const long double h = 5e-4L;
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double theta = angle(rng);
        auto at = [&](long double t) {
            Vec<2> x;
            x[0] = double(std::cos(t));
            x[1] = double(std::sin(t));
            return (long double)(preset.u(x));
        };
        const long double t = theta;
        const long double d2 = (-at(t - 2 * h) + 16 * at(t - h) - 30 * at(t) + 16 * at(t + h) -
                                at(t + 2 * h)) /
                               (12 * h * h);
        Vec<2> x;
        x[0] = std::cos(theta);
        x[1] = std::sin(theta);
        const long double res = -d2 + (long double)(preset.alpha) * at(t) - (long double)(preset.f(x));
        worst = std::max(worst, double(std::fabs((double)res)));
    }
    return worst;
}

template <>
double preset_residual_max(const Preset<3>& preset, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0.0;

    if (preset.surface.kind() == SurfaceKind::Sphere) {
        // Sum of second derivatives along two orthogonal great circles.
        const double h = 1e-3;
        for (int k = 0; k < samples; ++k) {
            Vec<3> p;
            double z = 2.0 * uni(rng) - 1.0;
            const double phi = 2.0 * M_PI * uni(rng);
            const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
            p << rxy * std::cos(phi), rxy * std::sin(phi), z;
            Vec<3> t1 = p.cross(Vec<3>(Vec<3>::Unit(std::abs(p[0]) < 0.9 ? 0 : 1)));
            t1.normalize();
            Vec<3> t2 = p.cross(t1);
            double lap = 0.0;
            for (const Vec<3>& t : {t1, t2}) {
                auto at = [&](double s) { return preset.u(std::cos(s) * p + std::sin(s) * t); };
                lap += (-at(-2 * h) + 16 * at(-h) - 30 * at(0.0) + 16 * at(h) - at(2 * h)) /
                       (12 * h * h);
            }
            worst = std::max(worst, std::abs(-lap + preset.alpha * preset.u(p) - preset.f(p)));
        }
        return worst;
    }

    // Torus: metric Laplacian in the angular chart,
    //   lap u = u_pp / G^2 + u_tt / r^2 - sin(t) u_t / (r G),  G = R + r cos t.
    const double r = kTorusMinor, big_r = kTorusMajor;
    auto point = [&](double phi, double theta) {
        const double g = big_r + r * std::cos(theta);
        Vec<3> x;
        x << g * std::cos(phi), g * std::sin(phi), r * std::sin(theta);
        return x;
    };
    const double h = 1e-3;
    for (int k = 0; k < samples; ++k) {
        const double phi = 2.0 * M_PI * uni(rng);
        const double theta = 2.0 * M_PI * uni(rng);
        auto up = [&](double dp, double dt) { return preset.u(point(phi + dp, theta + dt)); };
        const double upp =
            (-up(-2 * h, 0) + 16 * up(-h, 0) - 30 * up(0, 0) + 16 * up(h, 0) - up(2 * h, 0)) /
            (12 * h * h);
        const double utt =
            (-up(0, -2 * h) + 16 * up(0, -h) - 30 * up(0, 0) + 16 * up(0, h) - up(0, 2 * h)) /
            (12 * h * h);
        const double ut = (up(0, -2 * h) - 8 * up(0, -h) + 8 * up(0, h) - up(0, 2 * h)) / (12 * h);
        const double g = big_r + r * std::cos(theta);
        const double lap = upp / (g * g) + utt / (r * r) - std::sin(theta) * ut / (r * g);
        const Vec<3> x = point(phi, theta);
        worst = std::max(worst, std::abs(-lap + preset.alpha * preset.u(x) - preset.f(x)));
    }
    return worst;
}

} // namespace nbfem
