#ifndef DITER_TRANSFORMS_HPP
#define DITER_TRANSFORMS_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "diter/core.hpp"

namespace diter {

/// X = (I − cA)X + cB; the fixed point solves A.X = B. Diagonal entries
/// 1 − c·a_ii are stored explicitly unless exactly zero. Requires c > 0.
FixedPointProblem build_pc(const SparseMatrix& a, const DenseVector& b, double c);

/// Row-normalized form: q_ij = −a_ij/a_ii (i ≠ j), q_ii = 0,
/// f0_i = b_i/a_ii. The fixed point is the solution itself. Requires a
/// nonzero diagonal.
FixedPointProblem build_q(const SparseMatrix& a, const DenseVector& b);

/// Column-normalized form: q′_ij = −a_ij/a_jj (i ≠ j), f0 = b. The
/// iterate solves for x′_i = x_i·a_ii, so the problem carries
/// recover_scale = diag(a). Requires a nonzero diagonal.
FixedPointProblem build_qprime(const SparseMatrix& a, const DenseVector& b);

/// X = dP.X + (1−d)V. p must be column-substochastic, v a probability
/// vector, 0 < d < 1.
FixedPointProblem build_pagerank(const SparseMatrix& p, double d, const DenseVector& v);

/// Stationary-vector form for a column-stochastic p: operator
/// p − (alpha/n)J with the rank-one shift kept implicit, f0 = (1/n)·1.
/// The fixed point is the eigenvector of p normalized to sum 1.
FixedPointProblem build_eigen_shift(const SparseMatrix& p, double alpha);

struct DiagonalElim {
    int node;
    double old_weight;
};
struct LinkElim {
    int from;
    int to;
    double old_weight;
};
using ElimStep = std::variant<DiagonalElim, LinkElim>;

/// Record of elimination steps. fill_in counts link weights created or
/// updated along the way (the structural cost of the rewrite). Replaying
/// a log on the original problem reproduces the transformed problem
/// bit-for-bit.
struct EliminationLog {
    std::vector<ElimStep> steps;
    std::int64_t fill_in = 0;
};

/// Removes the self-loop at `node`: surviving in-links of the node and
/// its f0 entry are scaled by 1/(1 − p_ii). The solution is unchanged.
/// Appends one step to `log`. Requires p_ii < 1 and a purely sparse
/// operator.
FixedPointProblem eliminate_diagonal(const FixedPointProblem& prob, int node,
                                     EliminationLog& log);

/// Removes the link from → to (entry (to, from)): f0_to absorbs
/// weight·f0_from and every in-link (from, src) spawns a bypass
/// (to, src) += weight·p(from, src). Requires from ≠ to, a zero
/// self-loop at `from`, and that the link exists.
FixedPointProblem eliminate_link(const FixedPointProblem& prob, int from, int to,
                                 EliminationLog& log);

struct EliminateAllResult {
    bool ok = false;
    DenseVector solution;    // valid when ok
    std::string diagnostic;  // set when !ok
    EliminationLog log;      // partial when !ok
};

/// Eliminates every node (self-loop first, then each outgoing link in
/// ascending target order) following `order` (default: ascending index;
/// otherwise a permutation of 0..n−1). On success all links are gone and
/// the solution is read off f0 exactly. Aborts — with the partial log —
/// when an intermediate self-loop reaches 1 or the stored link count
/// exceeds fill_guard_multiple × the original nnz.
EliminateAllResult eliminate_all(const FixedPointProblem& prob, std::vector<int> order = {},
                                 double fill_guard_multiple = 50.0);

/// Re-applies a recorded log to `prob`, verifying that every recorded
/// old weight matches exactly. Returns the transformed problem.
FixedPointProblem replay(const FixedPointProblem& prob, const EliminationLog& log);

}  // namespace diter

#endif
