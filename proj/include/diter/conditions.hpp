#ifndef DITER_CONDITIONS_HPP
#define DITER_CONDITIONS_HPP

#include <optional>
#include <utility>

#include "diter/core.hpp"

namespace diter {

/// Outcome of a convergence-condition check. `margins` holds the
/// per-column (or per-row) slack; `witness` is the first violating index
/// when the check fails.
struct ConditionReport {
    bool satisfied = false;
    DenseVector margins;
    std::optional<int> witness;
};

/// Strict diagonal dominance by columns: margin_i = |a_ii| - sum_{j!=i} |a_ji|.
/// A missing diagonal is treated as |a_ii| = 0, not an error.
ConditionReport is_sdd_columns(const SparseMatrix& a);

/// Row version of the strict diagonal dominance check.
ConditionReport is_sdd_rows(const SparseMatrix& a);

/// Fluid diffusion reduction: every column's absolute sum strictly below
/// one. margin_i = 1 - column_abs_sums(op)_i.
ConditionReport fluid_reduction(const OperatorSpec& op);

/// Boundary variant: every column sum <= 1, at least one strictly < 1,
/// and the effective nonzero pattern strongly connected.
ConditionReport weak_fluid_reduction(const OperatorSpec& op);

/// True iff the directed nonzero-pattern graph is a single strongly
/// connected component (iterative Tarjan).
bool is_irreducible(const SparseMatrix& m);

/// 1 / max_{a_ij != 0} |a_ij|. Throws on an all-zero matrix.
double theorem1_c_bound(const SparseMatrix& a);

/// Column-counting convergence check for the stationary problem X = P.X
/// shifted by (alpha/N) J. n_plus[i] = |{j : p_ji >= alpha/N}|; the strict
/// form requires n_plus[i] > N/2 for every column, the weak form allows
/// equality when P is irreducible and at least one column is strict.
struct Theorem2Report {
    ConditionReport strict;  // margins: n_plus[i] - N/2
    bool satisfied_weak = false;
    std::vector<int> n_plus;
};

Theorem2Report theorem2_check(const SparseMatrix& p, double alpha);

/// Flips rows (and the matching b entries) whose diagonal is negative so
/// that all diagonal terms are positive; the solution set of A.X = B is
/// unchanged. Throws when a diagonal entry is zero, reporting its index.
std::pair<SparseMatrix, DenseVector> normalize_diagonal_sign(const SparseMatrix& a,
                                                             const DenseVector& b);

}  // namespace diter

#endif
