#ifndef DITER_BASELINES_HPP
#define DITER_BASELINES_HPP

#include <cstdint>
#include <string>

#include "diter/core.hpp"
#include "diter/engine.hpp"

namespace diter {

/// Result of a sweep-based reference method. `residual` is the final
/// certified residual — max_i |(b−A·x)_i/a_ii| for the linear solvers,
/// the L1 fixed-point residual for power_affine — and `converged`
/// certifies residual ≤ tol.
/// Trace rows use the method's per-sweep update norm ‖Δx‖₁ as the
/// residual/bound columns.
struct IterationReport {
    DenseVector solution;
    bool converged = false;
    int iterations = 0;
    std::int64_t link_cost = 0;
    double matvec_equiv = 0.0;
    double residual = 0.0;
    std::string diagnostic;  // nonempty when the sweep loop aborted
    Trace trace;
};

/// Synchronous x ← D⁻¹(b − (A−D)x) sweeps from x⁰ = 0; identical,
/// sweep for sweep, to power_affine on the row-normalized form of the
/// system. Stops when ‖Δx‖₁ ≤ tol or max_iter. Requires a nonzero
/// diagonal. A reference solution, when given, fills the per-row
/// true_error trace column.
IterationReport jacobi(const SparseMatrix& a, const DenseVector& b, double tol, int max_iter,
                       const DenseVector* reference = nullptr);

/// In-place ascending-index sweeps reusing already-updated entries.
IterationReport gauss_seidel(const SparseMatrix& a, const DenseVector& b, double tol,
                             int max_iter, const DenseVector* reference = nullptr);

/// x ← P·x + f0 from x⁰ = 0 — the partial sums of the power series.
IterationReport power_affine(const FixedPointProblem& prob, double tol, int max_iter,
                             const DenseVector* reference = nullptr);

/// Dense Gaussian elimination with partial pivoting; the test oracle.
/// Throws on singular input (pivot below 1e−14 × the matrix scale) and
/// on n > 10⁴.
DenseVector dense_solve(const SparseMatrix& a, const DenseVector& b);

}  // namespace diter

#endif
