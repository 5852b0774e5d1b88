#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbfem/errors.hpp"

namespace nbfem {

// Symmetric sparse matrix in compressed-row form; the full pattern is
// stored and must be structurally symmetric with sorted column indices.
struct SparseSym {
    std::int64_t n = 0;
    std::vector<std::int64_t> row_offsets; // size n + 1
    std::vector<std::int32_t> cols;
    std::vector<double> vals;

    std::int64_t nnz() const { return static_cast<std::int64_t>(cols.size()); }
    double& coeff(std::int64_t row, std::int64_t col); // throws if absent
    double inf_norm() const;
};

// y = M x. Row-parallel; each row is reduced sequentially, so the result is
// bitwise independent of the thread count.
void matvec(const SparseSym& m, std::span<const double> x, std::span<double> y, int threads = 1);

struct SolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

enum class Preconditioner { None, Jacobi };

// Preconditioned conjugate gradients for SPD systems, started from zero.
// Stops when ||b - Mx||_2 <= tol * ||b||_2; returns the final iterate with
// converged=false when the iteration budget runs out (max_iter <= 0 selects
// 50*sqrt(n) + 1000). Dot products are reduced in a fixed order, so results
// are deterministic for any thread count.
std::pair<std::vector<double>, SolveStats> cg_solve(const SparseSym& m,
                                                    std::span<const double> b, double tol = 1e-12,
                                                    std::int64_t max_iter = 0,
                                                    Preconditioner precond = Preconditioner::Jacobi,
                                                    int threads = 1);

} // namespace nbfem
