#include "nbfem/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "nbfem/parallel.hpp"

namespace nbfem {

double& SparseSym::coeff(std::int64_t row, std::int64_t col) {
    const auto begin = cols.begin() + row_offsets[static_cast<size_t>(row)];
    const auto end = cols.begin() + row_offsets[static_cast<size_t>(row) + 1];
    const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(col));
    if (it == end || *it != col) throw DimensionMismatch("entry not present in the sparsity pattern");
    return vals[static_cast<size_t>(it - cols.begin())];
}

double SparseSym::inf_norm() const {
    double best = 0.0;
    for (std::int64_t r = 0; r < n; ++r) {
        double sum = 0.0;
        for (std::int64_t k = row_offsets[static_cast<size_t>(r)]; k < row_offsets[static_cast<size_t>(r) + 1]; ++k) {
            sum += std::abs(vals[static_cast<size_t>(k)]);
        }
        best = std::max(best, sum);
    }
    return best;
}

void matvec(const SparseSym& m, std::span<const double> x, std::span<double> y, int threads) {
    if (static_cast<std::int64_t>(x.size()) != m.n || static_cast<std::int64_t>(y.size()) != m.n) {
        throw DimensionMismatch("matvec dimension mismatch");
    }
    parallel_for_chunks(m.n, threads, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t r = lo; r < hi; ++r) {
            double sum = 0.0;
            for (std::int64_t k = m.row_offsets[static_cast<size_t>(r)]; k < m.row_offsets[static_cast<size_t>(r) + 1]; ++k) {
                sum += m.vals[static_cast<size_t>(k)] * x[static_cast<size_t>(m.cols[static_cast<size_t>(k)])];
            }
            y[static_cast<size_t>(r)] = sum;
        }
    });
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

} // namespace

std::pair<std::vector<double>, SolveStats> cg_solve(const SparseSym& m, std::span<const double> b,
                                                    double tol, std::int64_t max_iter,
                                                    Preconditioner precond, int threads) {
    if (static_cast<std::int64_t>(b.size()) != m.n) throw DimensionMismatch("rhs size mismatch");
    if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
    if (max_iter <= 0) max_iter = static_cast<std::int64_t>(50.0 * std::sqrt(double(m.n))) + 1000;

    const std::int64_t n = m.n;
    std::vector<double> inv_diag;
    if (precond == Preconditioner::Jacobi) {
        inv_diag.assign(static_cast<size_t>(n), 1.0);
        for (std::int64_t r = 0; r < n; ++r) {
            for (std::int64_t k = m.row_offsets[static_cast<size_t>(r)]; k < m.row_offsets[static_cast<size_t>(r) + 1]; ++k) {
                if (m.cols[static_cast<size_t>(k)] == r) {
                    const double dgg = m.vals[static_cast<size_t>(k)];
                    if (!(dgg > 0.0)) throw BreakdownNonSPD("non-positive diagonal entry");
                    inv_diag[static_cast<size_t>(r)] = 1.0 / dgg;
                }
            }
        }
    }
    auto apply_precond = [&](std::span<const double> r, std::span<double> z) {
        if (precond == Preconditioner::Jacobi) {
            for (std::int64_t i = 0; i < n; ++i) z[static_cast<size_t>(i)] = inv_diag[static_cast<size_t>(i)] * r[static_cast<size_t>(i)];
        } else {
            std::copy(r.begin(), r.end(), z.begin());
        }
    };

    std::vector<double> x(static_cast<size_t>(n), 0.0);
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(static_cast<size_t>(n)), p(static_cast<size_t>(n)), q(static_cast<size_t>(n));

    const double bnorm = std::sqrt(dot(b, b));
    SolveStats stats;
    if (bnorm == 0.0) {
        stats.converged = true;
        return {std::move(x), stats};
    }

    apply_precond(r, z);
    std::copy(z.begin(), z.end(), p.begin());
    double rho = dot(r, z);
    double rnorm = std::sqrt(dot(r, r));

    for (std::int64_t it = 0; it < max_iter; ++it) {
        if (rnorm <= tol * bnorm) break;
        matvec(m, p, q, threads);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) {
            throw BreakdownNonSPD("p^T M p = " + std::to_string(pq) + " at iteration " +
                                  std::to_string(it));
        }
        const double alpha = rho / pq;
        for (std::int64_t i = 0; i < n; ++i) {
            x[static_cast<size_t>(i)] += alpha * p[static_cast<size_t>(i)];
            r[static_cast<size_t>(i)] -= alpha * q[static_cast<size_t>(i)];
        }
        stats.iterations = static_cast<int>(it + 1);
        rnorm = std::sqrt(dot(r, r));
        if (rnorm <= tol * bnorm) break;
        apply_precond(r, z);
        const double rho_next = dot(r, z);
        const double beta = rho_next / rho;
        rho = rho_next;
        for (std::int64_t i = 0; i < n; ++i) p[static_cast<size_t>(i)] = z[static_cast<size_t>(i)] + beta * p[static_cast<size_t>(i)];
    }

    stats.rel_residual = rnorm / bnorm;
    stats.converged = rnorm <= tol * bnorm;
    return {std::move(x), stats};
}

} // namespace nbfem
