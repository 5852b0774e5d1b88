#include "nbfem/lagrange.hpp"

#include <algorithm>

namespace nbfem {

namespace {

// One-dimensional factor of the lattice Lagrange basis:
//   P_m(t) = prod_{k=0}^{m-1} (r t - k) / (m - k),   P_0 = 1.
double factor(int m, int r, double t) {
    double p = 1.0;
    for (int k = 0; k < m; ++k) p *= (r * t - k) / double(m - k);
    return p;
}

// d/dt of P_m.
double factor_deriv(int m, int r, double t) {
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
        double p = double(r) / double(m - j);
        for (int k = 0; k < m; ++k) {
            if (k == j) continue;
            p *= (r * t - k) / double(m - k);
        }
        sum += p;
    }
    return sum;
}

} // namespace

template <int Dim>
LagrangeBasis<Dim>::LagrangeBasis(int order) : order_(order) {
    if (order < 1 || order > 3) throw Unsupported("Lagrange order must be 1, 2, or 3");
    // Vertices first.
    for (int k = 0; k <= Dim; ++k) {
        std::array<int, Dim + 1> a{};
        a[static_cast<size_t>(k)] = order;
        nodes_.push_back(a);
    }
    if (order > 1) {
        // Remaining lattice nodes in lexicographic order of the multi-index.
        std::array<int, Dim + 1> a{};
        auto emit = [&](auto&& self, int pos, int left) -> void {
            if (pos == Dim) {
                a[static_cast<size_t>(Dim)] = left;
                if (*std::max_element(a.begin(), a.end()) < order) nodes_.push_back(a);
                return;
            }
            for (int v = 0; v <= left; ++v) {
                a[static_cast<size_t>(pos)] = v;
                self(self, pos + 1, left - v);
            }
        };
        emit(emit, 0, order);
    }
}

template <int Dim>
Vec<Dim> LagrangeBasis<Dim>::node_ref(int i) const {
    const auto& a = nodes_[static_cast<size_t>(i)];
    Vec<Dim> xi;
    for (int d = 0; d < Dim; ++d) xi[d] = double(a[static_cast<size_t>(d) + 1]) / order_;
    return xi;
}

template <int Dim>
double LagrangeBasis<Dim>::value(int i, const Vec<Dim>& xi) const {
    const auto& a = nodes_[static_cast<size_t>(i)];
    double lambda0 = 1.0;
    for (int d = 0; d < Dim; ++d) lambda0 -= xi[d];
    double v = factor(a[0], order_, lambda0);
    for (int d = 0; d < Dim; ++d) v *= factor(a[static_cast<size_t>(d) + 1], order_, xi[d]);
    return v;
}

template <int Dim>
Vec<Dim> LagrangeBasis<Dim>::gradient(int i, const Vec<Dim>& xi) const {
    const auto& a = nodes_[static_cast<size_t>(i)];
    double lambda0 = 1.0;
    for (int d = 0; d < Dim; ++d) lambda0 -= xi[d];
    std::array<double, Dim + 1> lam;
    lam[0] = lambda0;
    for (int d = 0; d < Dim; ++d) lam[static_cast<size_t>(d) + 1] = xi[d];

    std::array<double, Dim + 1> val, der;
    for (int k = 0; k <= Dim; ++k) {
        val[static_cast<size_t>(k)] = factor(a[static_cast<size_t>(k)], order_, lam[static_cast<size_t>(k)]);
        der[static_cast<size_t>(k)] = factor_deriv(a[static_cast<size_t>(k)], order_, lam[static_cast<size_t>(k)]);
    }
    // d psi / d lambda_k, then chain rule with lambda_0 = 1 - sum(xi).
    std::array<double, Dim + 1> dlam;
    for (int k = 0; k <= Dim; ++k) {
        double p = der[static_cast<size_t>(k)];
        for (int j = 0; j <= Dim; ++j) {
            if (j != k) p *= val[static_cast<size_t>(j)];
        }
        dlam[static_cast<size_t>(k)] = p;
    }
    Vec<Dim> g;
    for (int d = 0; d < Dim; ++d) g[d] = dlam[static_cast<size_t>(d) + 1] - dlam[0];
    return g;
}

template <int Dim>
void LagrangeBasis<Dim>::values(const Vec<Dim>& xi, std::vector<double>& out) const {
    out.resize(nodes_.size());
    for (int i = 0; i < count(); ++i) out[static_cast<size_t>(i)] = value(i, xi);
}

template <int Dim>
void LagrangeBasis<Dim>::gradients(const Vec<Dim>& xi, std::vector<Vec<Dim>>& out) const {
    out.resize(nodes_.size());
    for (int i = 0; i < count(); ++i) out[static_cast<size_t>(i)] = gradient(i, xi);
}

template class LagrangeBasis<2>;
template class LagrangeBasis<3>;

} // namespace nbfem
