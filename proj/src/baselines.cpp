#include "diter/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "diter/transforms.hpp"

namespace diter {

namespace {

// Shared sweep loop for every x <- P.x + f0 method. Stops on the update
// norm; the caller decides what "converged" certifies.
double l1_distance(const DenseVector& x, const DenseVector& ref) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d += std::abs(x[i] - ref[i]);
    return d;
}

IterationReport affine_loop(const FixedPointProblem& prob, double tol, int max_iter,
                            const DenseVector* reference) {
    if (!(tol > 0.0)) throw std::invalid_argument("iterative baseline: tol must be positive");
    if (max_iter <= 0) throw std::invalid_argument("iterative baseline: max_iter must be positive");
    const int n = prob.size();
    const std::int64_t sweep = prob.op.sweep_link_cost();

    IterationReport rep;
    DenseVector x(n, 0.0);
    auto sample = [&](std::int64_t step, double delta) {
        TraceRow row;
        row.step = step;
        row.link_cost = rep.link_cost;
        row.matvec_equiv = sweep > 0 ? static_cast<double>(rep.link_cost) / sweep : 0.0;
        row.residual_l1 = delta;
        row.error_bound = delta;
        if (reference) row.true_error = l1_distance(prob.recover(x), *reference);
        rep.trace.rows.push_back(row);
    };

    sample(0, l1_norm(prob.f0));
    double first_delta = -1.0;
    bool stopped = false;
    for (int k = 1; k <= max_iter; ++k) {
        DenseVector next = matvec(prob.op, x);
        for (int i = 0; i < n; ++i) next[i] += prob.f0[i];
        double delta = 0.0;
        for (int i = 0; i < n; ++i) delta += std::abs(next[i] - x[i]);
        x = std::move(next);
        rep.link_cost += sweep;
        rep.iterations = k;
        sample(k, delta);
        if (delta <= tol) {
            stopped = true;
            break;
        }
        if (first_delta < 0.0) first_delta = delta;
        if (!std::isfinite(delta) || (first_delta > 0.0 && delta > 1e6 * first_delta)) {
            rep.diagnostic = "sweep updates diverged past 1e6 x their initial size";
            break;
        }
    }
    rep.converged = stopped;
    rep.solution = std::move(x);
    rep.matvec_equiv = sweep > 0 ? static_cast<double>(rep.link_cost) / sweep : 0.0;
    return rep;
}

// Diagonally scaled residual max_i |(b - A.x)_i / a_ii|: the quantity the
// sweep methods actually drive down, so the certificate is attainable at
// the requested tolerance regardless of the scale of A.
double scaled_residual_inf(const SparseMatrix& a, const DenseVector& x, const DenseVector& b) {
    DenseVector ax = matvec(OperatorSpec(a), x);
    double worst = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
        worst = std::max(worst, std::abs((ax[i] - b[i]) / a.entry(static_cast<int>(i),
                                                                  static_cast<int>(i))));
    return worst;
}

}  // namespace

IterationReport jacobi(const SparseMatrix& a, const DenseVector& b, double tol, int max_iter,
                       const DenseVector* reference) {
    IterationReport rep = affine_loop(build_q(a, b), tol, max_iter, reference);
    rep.residual = scaled_residual_inf(a, rep.solution, b);
    rep.converged = rep.converged && rep.residual <= tol;
    return rep;
}

IterationReport gauss_seidel(const SparseMatrix& a, const DenseVector& b, double tol,
                             int max_iter, const DenseVector* reference) {
    if (!(tol > 0.0)) throw std::invalid_argument("gauss_seidel: tol must be positive");
    if (max_iter <= 0) throw std::invalid_argument("gauss_seidel: max_iter must be positive");
    const int n = a.size();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("gauss_seidel: dimension mismatch");
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) {
        diag[i] = a.entry(i, i);
        if (diag[i] == 0.0)
            throw std::invalid_argument("gauss_seidel: zero diagonal at index " +
                                        std::to_string(i));
    }
    const std::int64_t sweep = a.nnz() - static_cast<std::int64_t>(n);

    IterationReport rep;
    DenseVector x(n, 0.0);
    auto sample = [&](std::int64_t step, double delta) {
        TraceRow row;
        row.step = step;
        row.link_cost = rep.link_cost;
        row.matvec_equiv = sweep > 0 ? static_cast<double>(rep.link_cost) / sweep : 0.0;
        row.residual_l1 = delta;
        row.error_bound = delta;
        if (reference) row.true_error = l1_distance(x, *reference);
        rep.trace.rows.push_back(row);
    };

    sample(0, l1_norm(b));
    double first_delta = -1.0;
    bool stopped = false;
    for (int k = 1; k <= max_iter; ++k) {
        double delta = 0.0;
        for (int i = 0; i < n; ++i) {
            auto cols = a.row_cols(i);
            auto vals = a.row_values(i);
            double acc = b[i];
            for (std::size_t t = 0; t < cols.size(); ++t)
                if (cols[t] != i) acc -= vals[t] * x[cols[t]];
            const double updated = acc / diag[i];
            delta += std::abs(updated - x[i]);
            x[i] = updated;
        }
        rep.link_cost += sweep;
        rep.iterations = k;
        sample(k, delta);
        if (delta <= tol) {
            stopped = true;
            break;
        }
        if (first_delta < 0.0) first_delta = delta;
        if (!std::isfinite(delta) || (first_delta > 0.0 && delta > 1e6 * first_delta)) {
            rep.diagnostic = "sweep updates diverged past 1e6 x their initial size";
            break;
        }
    }
    rep.converged = stopped;
    rep.solution = std::move(x);
    rep.matvec_equiv = sweep > 0 ? static_cast<double>(rep.link_cost) / sweep : 0.0;
    rep.residual = scaled_residual_inf(a, rep.solution, b);
    rep.converged = rep.converged && rep.residual <= tol;
    return rep;
}

IterationReport power_affine(const FixedPointProblem& prob, double tol, int max_iter,
                             const DenseVector* reference) {
    IterationReport rep = affine_loop(prob, tol, max_iter, reference);
    // Fixed-point residual of the raw iterate (before any recovery scaling).
    DenseVector next = matvec(prob.op, rep.solution);
    double res = 0.0;
    for (int i = 0; i < prob.size(); ++i)
        res += std::abs(next[i] + prob.f0[i] - rep.solution[i]);
    rep.residual = res;
    rep.converged = rep.converged && rep.residual <= tol;
    rep.solution = prob.recover(rep.solution);
    return rep;
}

DenseVector dense_solve(const SparseMatrix& a, const DenseVector& b) {
    const int n = a.size();
    if (n > 10000) throw std::invalid_argument("dense_solve: refusing n > 10^4");
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("dense_solve: dimension mismatch");

    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    double scale = 0.0;
    for (const Triplet& t : a.triplets()) {
        m[static_cast<std::size_t>(t.row) * n + t.col] = t.value;
        scale = std::max(scale, std::abs(t.value));
    }
    DenseVector x = b;
    const double pivot_floor = 1e-14 * (scale > 0.0 ? scale : 1.0);

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int best = col;
        double best_abs = std::abs(m[static_cast<std::size_t>(perm[col]) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double cand = std::abs(m[static_cast<std::size_t>(perm[r]) * n + col]);
            if (cand > best_abs) {
                best_abs = cand;
                best = r;
            }
        }
        if (best_abs < pivot_floor)
            throw std::runtime_error("dense_solve: matrix is singular (pivot " +
                                     std::to_string(best_abs) + " at column " +
                                     std::to_string(col) + ")");
        std::swap(perm[col], perm[best]);
        const double* prow = &m[static_cast<std::size_t>(perm[col]) * n];
        for (int r = col + 1; r < n; ++r) {
            double* row = &m[static_cast<std::size_t>(perm[r]) * n];
            const double factor = row[col] / prow[col];
            if (factor == 0.0) continue;
            row[col] = 0.0;
            for (int c = col + 1; c < n; ++c) row[c] -= factor * prow[c];
            x[perm[r]] -= factor * x[perm[col]];
        }
    }
    DenseVector out(n);
    for (int row = n - 1; row >= 0; --row) {
        const double* prow = &m[static_cast<std::size_t>(perm[row]) * n];
        double acc = x[perm[row]];
        for (int c = row + 1; c < n; ++c) acc -= prow[c] * out[c];
        out[row] = acc / prow[row];
    }
    return out;
}

}  // namespace diter
