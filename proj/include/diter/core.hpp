#ifndef DITER_CORE_HPP
#define DITER_CORE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace diter {

/// Dense real vector. Operations reject non-finite entries at API
/// boundaries (see check_finite).
using DenseVector = std::vector<double>;

void check_finite(const DenseVector& v, const char* what);
double l1_norm(const DenseVector& v);
double linf_norm(const DenseVector& v);

struct Triplet {
    int row;
    int col;
    double value;
};

/// Column-oriented sparse square matrix over the diffusion convention:
/// the stored entry (row j, col i) is p_ji, the weight of the edge from
/// node i to node j. Column i therefore lists the out-links of node i,
/// row j the in-links of node j. Immutable after construction; both the
/// column view and the row mirror are built up front so degree queries
/// and row traversal are O(1)/O(entries) without synchronization.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Builds from (row, col, value) triplets. Duplicates are summed,
    /// entries that are exactly zero after summing are dropped.
    static SparseMatrix from_triplets(int n, std::vector<Triplet> triplets);
    static SparseMatrix identity(int n);

    int size() const { return n_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }

    int out_degree(int col) const { return static_cast<int>(col_ptr_[col + 1] - col_ptr_[col]); }
    int in_degree(int row) const { return static_cast<int>(row_ptr_[row + 1] - row_ptr_[row]); }

    /// Column i as parallel spans of row indices and values, sorted by row.
    std::span<const int> column_rows(int col) const;
    std::span<const double> column_values(int col) const;

    /// Row j as parallel spans of column indices and values, sorted by column.
    std::span<const int> row_cols(int row) const;
    std::span<const double> row_values(int row) const;

    /// Stored value at (row, col); 0.0 when the entry is absent.
    double entry(int row, int col) const;

    /// Canonical triplet list (column-major, rows ascending).
    std::vector<Triplet> triplets() const;

    bool operator==(const SparseMatrix& other) const;

private:
    int n_ = 0;
    std::vector<std::int64_t> col_ptr_{0};
    std::vector<int> row_idx_;
    std::vector<double> values_;
    // row-major mirror of the same entries
    std::vector<std::int64_t> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> row_values_;

    void build_row_mirror();
};

/// Rank-one correction sigma * u * v^t applied implicitly; never densified.
struct RankOne {
    double sigma = 0.0;
    DenseVector u;
    DenseVector v;
};

/// A diffusion operator: explicit sparse part plus an optional implicit
/// rank-one term. Effective entry (i, j) = sparse(i, j) + sigma*u_i*v_j.
struct OperatorSpec {
    SparseMatrix sparse;
    std::optional<RankOne> rank_one;

    OperatorSpec() = default;
    explicit OperatorSpec(SparseMatrix s) : sparse(std::move(s)) {}
    OperatorSpec(SparseMatrix s, RankOne r);

    int size() const { return sparse.size(); }
    double effective_entry(int row, int col) const;

    /// Link applications consumed by one full sweep (one diffusion per
    /// node): sparse nnz, plus n per column when the rank-one part is
    /// active. Used as the matvec-equivalent cost normalizer.
    std::int64_t sweep_link_cost() const;
};

/// Fixed-point problem X = P.X + F0. When recover_scale is present the
/// iterate solves for the rescaled unknown and the reported solution is
/// x_i = h_i / recover_scale_i.
struct FixedPointProblem {
    OperatorSpec op;
    DenseVector f0;
    std::optional<DenseVector> recover_scale;

    FixedPointProblem() = default;
    FixedPointProblem(OperatorSpec o, DenseVector f,
                      std::optional<DenseVector> scale = std::nullopt);

    int size() const { return op.size(); }
    DenseVector recover(const DenseVector& h) const;
};

/// (sparse + sigma u v^t) . x with a fixed evaluation order: sparse part
/// column by column in index order, then the rank-one term.
DenseVector matvec(const OperatorSpec& op, const DenseVector& x);

/// Entry i = sum_j |effective (j, i)|. With an active rank-one part each
/// column is evaluated entry-wise through a scratch buffer.
DenseVector column_abs_sums(const OperatorSpec& op);

struct Degrees {
    std::vector<int> in;
    std::vector<int> out;
};

/// Structural (nonzero-pattern) in/out degrees per node.
Degrees degrees(const SparseMatrix& m);

}  // namespace diter

#endif
