#pragma once

#include <array>
#include <vector>

#include "nbfem/geometry.hpp"

namespace nbfem {

// Lagrange basis of order r on the reference simplex, with nodes on the
// principal lattice. Node order: the Dim+1 vertices first (node k at
// barycentric r*e_k), then the remaining lattice multi-indices in a fixed
// enumeration order shared by every consumer.
template <int Dim>
class LagrangeBasis {
public:
    explicit LagrangeBasis(int order);

    int order() const { return order_; }
    int count() const { return static_cast<int>(nodes_.size()); }

    // Barycentric multi-index of node i (entries sum to order).
    const std::array<int, Dim + 1>& node(int i) const { return nodes_[static_cast<size_t>(i)]; }

    // Reference coordinates of node i.
    Vec<Dim> node_ref(int i) const;

    double value(int i, const Vec<Dim>& xi) const;
    Vec<Dim> gradient(int i, const Vec<Dim>& xi) const;

    // Convenience: all values / gradients at one point.
    void values(const Vec<Dim>& xi, std::vector<double>& out) const;
    void gradients(const Vec<Dim>& xi, std::vector<Vec<Dim>>& out) const;

private:
    int order_;
    std::vector<std::array<int, Dim + 1>> nodes_;
};

extern template class LagrangeBasis<2>;
extern template class LagrangeBasis<3>;

} // namespace nbfem
