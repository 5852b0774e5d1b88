#include "nbfem/quadrature.hpp"

#include <cmath>

namespace nbfem {

std::vector<Quad1D> gauss_legendre_01(int points) {
    // Abscissas/weights on [-1, 1].
    static const double kX2 = 0.5773502691896257645;
    static const double kX3 = 0.7745966692414833770;
    static const double kX4a = 0.3399810435848562648, kX4b = 0.8611363115940525752;
    static const double kW4a = 0.6521451548625461426, kW4b = 0.3478548451374538574;
    static const double kX5a = 0.5384693101056830910, kX5b = 0.9061798459386639928;
    static const double kW5z = 0.5688888888888888889;
    static const double kW5a = 0.4786286704993664681, kW5b = 0.2369268850561890875;
    static const double kX6a = 0.2386191860831969086, kX6b = 0.6612093864662645137,
                        kX6c = 0.9324695142031520278;
    static const double kW6a = 0.4679139345726910474, kW6b = 0.3607615730481386076,
                        kW6c = 0.1713244923791703450;

    std::vector<double> x, w;
    switch (points) {
    case 1: x = {0.0}; w = {2.0}; break;
    case 2: x = {-kX2, kX2}; w = {1.0, 1.0}; break;
    case 3: x = {-kX3, 0.0, kX3}; w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}; break;
    case 4: x = {-kX4b, -kX4a, kX4a, kX4b}; w = {kW4b, kW4a, kW4a, kW4b}; break;
    case 5: x = {-kX5b, -kX5a, 0.0, kX5a, kX5b}; w = {kW5b, kW5a, kW5z, kW5a, kW5b}; break;
    case 6:
        x = {-kX6c, -kX6b, -kX6a, kX6a, kX6b, kX6c};
        w = {kW6c, kW6b, kW6a, kW6a, kW6b, kW6c};
        break;
    default:
        throw UnsupportedDegree("Gauss-Legendre rule supports 1..6 points, got " +
                                std::to_string(points));
    }
    std::vector<Quad1D> rule(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        rule[i] = {0.5 * (x[i] + 1.0), 0.5 * w[i]};
    }
    return rule;
}

template <>
std::vector<RefQuadPoint<2>> reference_simplex_rule<2>(int degree) {
    if (degree < 0) throw UnsupportedDegree("negative quadrature degree");
    // Collapsed map (u, v) -> (u, v (1-u)) with Jacobian (1-u); the u-factor
    // raises the polynomial degree by one.
    const int n = (degree + 2 + 1) / 2;
    const auto line = gauss_legendre_01(n);
    std::vector<RefQuadPoint<2>> rule;
    rule.reserve(line.size() * line.size());
    for (const auto& [u, wu] : line) {
        for (const auto& [v, wv] : line) {
            RefQuadPoint<2> q;
            q.xi[0] = u;
            q.xi[1] = v * (1.0 - u);
            q.w = wu * wv * (1.0 - u);
            rule.push_back(q);
        }
    }
    return rule;
}

template <>
std::vector<RefQuadPoint<3>> reference_simplex_rule<3>(int degree) {
    if (degree < 0) throw UnsupportedDegree("negative quadrature degree");
    // (u, v, w) -> (u, v(1-u), w(1-u)(1-v)); Jacobian (1-u)^2 (1-v).
    const int n = (degree + 3 + 1) / 2;
    const auto line = gauss_legendre_01(n);
    std::vector<RefQuadPoint<3>> rule;
    rule.reserve(line.size() * line.size() * line.size());
    for (const auto& [u, wu] : line) {
        for (const auto& [v, wv] : line) {
            for (const auto& [w, ww] : line) {
                RefQuadPoint<3> q;
                q.xi[0] = u;
                q.xi[1] = v * (1.0 - u);
                q.xi[2] = w * (1.0 - u) * (1.0 - v);
                q.w = wu * wv * ww * (1.0 - u) * (1.0 - u) * (1.0 - v);
                rule.push_back(q);
            }
        }
    }
    return rule;
}

} // namespace nbfem
