#include "diter/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace diter {

void check_finite(const DenseVector& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw std::invalid_argument(std::string(what) + ": non-finite entry at index " +
                                        std::to_string(i));
        }
    }
}

double l1_norm(const DenseVector& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

double linf_norm(const DenseVector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
    if (n < 1) throw std::invalid_argument("SparseMatrix: dimension must be >= 1");
    for (const Triplet& t : triplets) {
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
            throw std::invalid_argument("SparseMatrix: index (" + std::to_string(t.row) + ", " +
                                        std::to_string(t.col) + ") out of range for n=" +
                                        std::to_string(n));
        }
        if (!std::isfinite(t.value)) {
            throw std::invalid_argument("SparseMatrix: non-finite value at (" +
                                        std::to_string(t.row) + ", " + std::to_string(t.col) + ")");
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });

    SparseMatrix m;
    m.n_ = n;
    m.col_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    m.row_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());

    std::size_t i = 0;
    for (int col = 0; col < n; ++col) {
        while (i < triplets.size() && triplets[i].col == col) {
            int row = triplets[i].row;
            double sum = 0.0;
            while (i < triplets.size() && triplets[i].col == col && triplets[i].row == row) {
                sum += triplets[i].value;  // duplicates summed
                ++i;
            }
            if (sum != 0.0) {
                m.row_idx_.push_back(row);
                m.values_.push_back(sum);
            }
        }
        m.col_ptr_[static_cast<std::size_t>(col) + 1] =
            static_cast<std::int64_t>(m.row_idx_.size());
    }
    m.build_row_mirror();
    return m;
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<Triplet> ts;
    ts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ts.push_back({i, i, 1.0});
    return from_triplets(n, std::move(ts));
}

void SparseMatrix::build_row_mirror() {
    row_ptr_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (int r : row_idx_) row_ptr_[static_cast<std::size_t>(r) + 1]++;
    for (int r = 0; r < n_; ++r) row_ptr_[static_cast<std::size_t>(r) + 1] += row_ptr_[r];

    col_idx_.resize(row_idx_.size());
    row_values_.resize(values_.size());
    std::vector<std::int64_t> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
    for (int col = 0; col < n_; ++col) {
        for (std::int64_t k = col_ptr_[col]; k < col_ptr_[static_cast<std::size_t>(col) + 1]; ++k) {
            std::int64_t dst = cursor[row_idx_[static_cast<std::size_t>(k)]]++;
            col_idx_[static_cast<std::size_t>(dst)] = col;
            row_values_[static_cast<std::size_t>(dst)] = values_[static_cast<std::size_t>(k)];
        }
    }
    // column-major fill visits columns in ascending order, so rows end up
    // sorted by column without an extra pass
}

std::span<const int> SparseMatrix::column_rows(int col) const {
    return {row_idx_.data() + col_ptr_[col],
            static_cast<std::size_t>(col_ptr_[static_cast<std::size_t>(col) + 1] - col_ptr_[col])};
}

std::span<const double> SparseMatrix::column_values(int col) const {
    return {values_.data() + col_ptr_[col],
            static_cast<std::size_t>(col_ptr_[static_cast<std::size_t>(col) + 1] - col_ptr_[col])};
}

std::span<const int> SparseMatrix::row_cols(int row) const {
    return {col_idx_.data() + row_ptr_[row],
            static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(row) + 1] - row_ptr_[row])};
}

std::span<const double> SparseMatrix::row_values(int row) const {
    return {row_values_.data() + row_ptr_[row],
            static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(row) + 1] - row_ptr_[row])};
}

double SparseMatrix::entry(int row, int col) const {
    auto rows = column_rows(col);
    auto it = std::lower_bound(rows.begin(), rows.end(), row);
    if (it == rows.end() || *it != row) return 0.0;
    return column_values(col)[static_cast<std::size_t>(it - rows.begin())];
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(values_.size());
    for (int col = 0; col < n_; ++col) {
        auto rows = column_rows(col);
        auto vals = column_values(col);
        for (std::size_t k = 0; k < rows.size(); ++k) out.push_back({rows[k], col, vals[k]});
    }
    return out;
}

bool SparseMatrix::operator==(const SparseMatrix& other) const {
    return n_ == other.n_ && col_ptr_ == other.col_ptr_ && row_idx_ == other.row_idx_ &&
           values_ == other.values_;
}

OperatorSpec::OperatorSpec(SparseMatrix s, RankOne r) : sparse(std::move(s)), rank_one(std::move(r)) {
    const auto n = static_cast<std::size_t>(sparse.size());
    if (rank_one->u.size() != n || rank_one->v.size() != n) {
        throw std::invalid_argument("OperatorSpec: rank-one vectors must have length n");
    }
    if (!std::isfinite(rank_one->sigma)) {
        throw std::invalid_argument("OperatorSpec: non-finite rank-one scale");
    }
    check_finite(rank_one->u, "OperatorSpec rank-one u");
    check_finite(rank_one->v, "OperatorSpec rank-one v");
}

double OperatorSpec::effective_entry(int row, int col) const {
    double v = sparse.entry(row, col);
    if (rank_one) v += rank_one->sigma * rank_one->u[row] * rank_one->v[col];
    return v;
}

std::int64_t OperatorSpec::sweep_link_cost() const {
    std::int64_t c = sparse.nnz();
    if (rank_one) c += static_cast<std::int64_t>(size()) * size();
    return c;
}

FixedPointProblem::FixedPointProblem(OperatorSpec o, DenseVector f,
                                     std::optional<DenseVector> scale)
    : op(std::move(o)), f0(std::move(f)), recover_scale(std::move(scale)) {
    if (static_cast<int>(f0.size()) != op.size()) {
        throw std::invalid_argument("FixedPointProblem: f0 length must match operator dimension");
    }
    check_finite(f0, "FixedPointProblem f0");
    if (recover_scale) {
        if (static_cast<int>(recover_scale->size()) != op.size()) {
            throw std::invalid_argument("FixedPointProblem: recover_scale length mismatch");
        }
        for (double s : *recover_scale) {
            if (s == 0.0 || !std::isfinite(s)) {
                throw std::invalid_argument("FixedPointProblem: recover_scale entries must be nonzero");
            }
        }
    }
}

DenseVector FixedPointProblem::recover(const DenseVector& h) const {
    if (!recover_scale) return h;
    DenseVector x(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) x[i] = h[i] / (*recover_scale)[i];
    return x;
}

DenseVector matvec(const OperatorSpec& op, const DenseVector& x) {
    const int n = op.size();
    if (static_cast<int>(x.size()) != n) {
        throw std::invalid_argument("matvec: dimension mismatch");
    }
    DenseVector y(static_cast<std::size_t>(n), 0.0);
    for (int col = 0; col < n; ++col) {
        const double xi = x[static_cast<std::size_t>(col)];
        auto rows = op.sparse.column_rows(col);
        auto vals = op.sparse.column_values(col);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            y[static_cast<std::size_t>(rows[k])] += vals[k] * xi;
        }
    }
    if (op.rank_one) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += op.rank_one->v[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        const double t = op.rank_one->sigma * s;
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += op.rank_one->u[static_cast<std::size_t>(i)] * t;
    }
    return y;
}

DenseVector column_abs_sums(const OperatorSpec& op) {
    const int n = op.size();
    DenseVector sums(static_cast<std::size_t>(n), 0.0);
    if (!op.rank_one) {
        for (int col = 0; col < n; ++col) {
            double s = 0.0;
            for (double v : op.sparse.column_values(col)) s += std::abs(v);
            sums[static_cast<std::size_t>(col)] = s;
        }
        return sums;
    }
    // Rank-one part makes every entry of a column potentially nonzero:
    // scatter the sparse column into a scratch buffer so each effective
    // entry is |sparse + sigma*u_i*v_col| exactly once.
    DenseVector scratch(static_cast<std::size_t>(n), 0.0);
    for (int col = 0; col < n; ++col) {
        auto rows = op.sparse.column_rows(col);
        auto vals = op.sparse.column_values(col);
        for (std::size_t k = 0; k < rows.size(); ++k) scratch[static_cast<std::size_t>(rows[k])] = vals[k];
        const double t = op.rank_one->sigma * op.rank_one->v[static_cast<std::size_t>(col)];
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            s += std::abs(scratch[static_cast<std::size_t>(i)] + op.rank_one->u[static_cast<std::size_t>(i)] * t);
        }
        sums[static_cast<std::size_t>(col)] = s;
        for (int r : rows) scratch[static_cast<std::size_t>(r)] = 0.0;
    }
    return sums;
}

Degrees degrees(const SparseMatrix& m) {
    Degrees d;
    const int n = m.size();
    d.in.resize(static_cast<std::size_t>(n));
    d.out.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        d.out[static_cast<std::size_t>(i)] = m.out_degree(i);
        d.in[static_cast<std::size_t>(i)] = m.in_degree(i);
    }
    return d;
}

}  // namespace diter
