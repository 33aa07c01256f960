#include "diter/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace diter {

namespace {

ConditionReport report_from_margins(DenseVector margins) {
    ConditionReport rep;
    rep.satisfied = true;
    for (std::size_t i = 0; i < margins.size(); ++i) {
        if (!(margins[i] > 0.0)) {
            rep.satisfied = false;
            rep.witness = static_cast<int>(i);
            break;
        }
    }
    rep.margins = std::move(margins);
    return rep;
}

// Nonzero pattern of the effective operator, values flattened to 1. With
// an active rank-one part columns are expanded through a scratch buffer so
// exact cancellations drop out of the pattern.
SparseMatrix effective_pattern(const OperatorSpec& op) {
    if (!op.rank_one || op.rank_one->sigma == 0.0) return op.sparse;
    const int n = op.size();
    std::vector<Triplet> trips;
    DenseVector scratch(n, 0.0);
    for (int col = 0; col < n; ++col) {
        auto rows = op.sparse.column_rows(col);
        auto vals = op.sparse.column_values(col);
        const double vc = op.rank_one->sigma * op.rank_one->v[col];
        if (vc == 0.0) {
            for (std::size_t k = 0; k < rows.size(); ++k)
                trips.push_back({rows[k], col, 1.0});
            continue;
        }
        for (std::size_t k = 0; k < rows.size(); ++k) scratch[rows[k]] = vals[k];
        for (int i = 0; i < n; ++i) {
            if (scratch[i] + vc * op.rank_one->u[i] != 0.0) trips.push_back({i, col, 1.0});
            scratch[i] = 0.0;
        }
    }
    return SparseMatrix::from_triplets(n, std::move(trips));
}

}  // namespace

ConditionReport is_sdd_columns(const SparseMatrix& a) {
    const int n = a.size();
    DenseVector margins(n, 0.0);
    for (int col = 0; col < n; ++col) {
        auto rows = a.column_rows(col);
        auto vals = a.column_values(col);
        double diag = 0.0;
        double off = 0.0;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (rows[k] == col)
                diag = std::abs(vals[k]);
            else
                off += std::abs(vals[k]);
        }
        margins[col] = diag - off;
    }
    return report_from_margins(std::move(margins));
}

ConditionReport is_sdd_rows(const SparseMatrix& a) {
    const int n = a.size();
    DenseVector margins(n, 0.0);
    for (int row = 0; row < n; ++row) {
        auto cols = a.row_cols(row);
        auto vals = a.row_values(row);
        double diag = 0.0;
        double off = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (cols[k] == row)
                diag = std::abs(vals[k]);
            else
                off += std::abs(vals[k]);
        }
        margins[row] = diag - off;
    }
    return report_from_margins(std::move(margins));
}

ConditionReport fluid_reduction(const OperatorSpec& op) {
    DenseVector sums = column_abs_sums(op);
    for (double& s : sums) s = 1.0 - s;
    return report_from_margins(std::move(sums));
}

ConditionReport weak_fluid_reduction(const OperatorSpec& op) {
    const DenseVector sums = column_abs_sums(op);
    const int n = op.size();
    ConditionReport rep;
    rep.margins.resize(n);
    bool all_le = true;
    bool any_lt = false;
    for (int i = 0; i < n; ++i) {
        rep.margins[i] = 1.0 - sums[i];
        if (sums[i] > 1.0) {
            all_le = false;
            if (!rep.witness) rep.witness = i;
        } else if (sums[i] < 1.0) {
            any_lt = true;
        }
    }
    rep.satisfied = all_le && any_lt && is_irreducible(effective_pattern(op));
    return rep;
}

bool is_irreducible(const SparseMatrix& m) {
    const int n = m.size();
    if (n <= 1) return true;

    // Tarjan with an explicit stack; bails out as soon as a second
    // component closes.
    std::vector<int> index(n, -1), lowlink(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    stack.reserve(n);
    int next_index = 0;
    int components = 0;

    struct Frame {
        int node;
        std::size_t edge;
    };
    std::vector<Frame> call;

    for (int start = 0; start < n; ++start) {
        if (index[start] != -1) continue;
        call.push_back({start, 0});
        index[start] = lowlink[start] = next_index++;
        stack.push_back(start);
        on_stack[start] = 1;
        while (!call.empty()) {
            Frame& fr = call.back();
            auto rows = m.column_rows(fr.node);
            if (fr.edge < rows.size()) {
                const int to = rows[fr.edge++];
                if (index[to] == -1) {
                    index[to] = lowlink[to] = next_index++;
                    stack.push_back(to);
                    on_stack[to] = 1;
                    call.push_back({to, 0});
                } else if (on_stack[to]) {
                    lowlink[fr.node] = std::min(lowlink[fr.node], index[to]);
                }
            } else {
                if (lowlink[fr.node] == index[fr.node]) {
                    ++components;
                    if (components > 1) return false;
                    int popped;
                    do {
                        popped = stack.back();
                        stack.pop_back();
                        on_stack[popped] = 0;
                    } while (popped != fr.node);
                }
                const int child = fr.node;
                call.pop_back();
                if (!call.empty())
                    lowlink[call.back().node] = std::min(lowlink[call.back().node], lowlink[child]);
            }
        }
    }
    return components == 1;
}

double theorem1_c_bound(const SparseMatrix& a) {
    if (a.nnz() == 0) throw std::invalid_argument("theorem1_c_bound: all-zero matrix");
    double max_abs = 0.0;
    for (int col = 0; col < a.size(); ++col)
        for (double v : a.column_values(col)) max_abs = std::max(max_abs, std::abs(v));
    return 1.0 / max_abs;
}

Theorem2Report theorem2_check(const SparseMatrix& p, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("theorem2_check: alpha must be positive");
    const int n = p.size();
    constexpr double kStochasticTol = 1e-12;
    for (int col = 0; col < n; ++col) {
        double sum = 0.0;
        for (double v : p.column_values(col)) {
            if (v < -kStochasticTol)
                throw std::invalid_argument("theorem2_check: negative entry in column " +
                                            std::to_string(col));
            sum += v;
        }
        if (std::abs(sum - 1.0) > kStochasticTol)
            throw std::invalid_argument("theorem2_check: column " + std::to_string(col) +
                                        " is not stochastic (sum " + std::to_string(sum) + ")");
    }

    const double threshold = alpha / n;
    Theorem2Report rep;
    rep.n_plus.resize(n, 0);
    rep.strict.margins.resize(n);
    rep.strict.satisfied = true;
    bool all_weak = true;
    bool any_strict = false;
    for (int col = 0; col < n; ++col) {
        int count = 0;
        for (double v : p.column_values(col))
            if (v >= threshold) ++count;
        rep.n_plus[col] = count;
        rep.strict.margins[col] = count - n / 2.0;
        if (2 * count > n) {
            any_strict = true;
        } else {
            if (rep.strict.satisfied) {
                rep.strict.satisfied = false;
                rep.strict.witness = col;
            }
            if (2 * count < n) all_weak = false;
        }
    }
    rep.satisfied_weak = all_weak && any_strict && is_irreducible(p);
    return rep;
}

std::pair<SparseMatrix, DenseVector> normalize_diagonal_sign(const SparseMatrix& a,
                                                             const DenseVector& b) {
    const int n = a.size();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("normalize_diagonal_sign: dimension mismatch");
    std::vector<double> diag(n, 0.0);
    for (int i = 0; i < n; ++i) diag[i] = a.entry(i, i);
    for (int i = 0; i < n; ++i)
        if (diag[i] == 0.0)
            throw std::invalid_argument("normalize_diagonal_sign: zero diagonal at index " +
                                        std::to_string(i));

    bool any_negative = false;
    for (int i = 0; i < n; ++i)
        if (diag[i] < 0.0) any_negative = true;
    if (!any_negative) return {a, b};

    std::vector<Triplet> trips = a.triplets();
    for (Triplet& t : trips)
        if (diag[t.row] < 0.0) t.value = -t.value;
    DenseVector nb = b;
    for (int i = 0; i < n; ++i)
        if (diag[i] < 0.0) nb[i] = -nb[i];
    return {SparseMatrix::from_triplets(n, std::move(trips)), std::move(nb)};
}

}  // namespace diter
