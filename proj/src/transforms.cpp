#include "diter/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace diter {

namespace {

std::vector<double> diagonal_of(const SparseMatrix& a, const char* who) {
    const int n = a.size();
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) {
        diag[i] = a.entry(i, i);
        if (diag[i] == 0.0)
            throw std::invalid_argument(std::string(who) + ": zero diagonal at index " +
                                        std::to_string(i));
    }
    return diag;
}

void require_stochastic_columns(const SparseMatrix& p, const char* who) {
    constexpr double kTol = 1e-12;
    for (int col = 0; col < p.size(); ++col) {
        double sum = 0.0;
        for (double v : p.column_values(col)) {
            if (v < -kTol)
                throw std::invalid_argument(std::string(who) + ": negative entry in column " +
                                            std::to_string(col));
            sum += v;
        }
        if (std::abs(sum - 1.0) > kTol)
            throw std::invalid_argument(std::string(who) + ": column " + std::to_string(col) +
                                        " sums to " + std::to_string(sum) + ", expected 1");
    }
}

// Mutable twin-map view of a sparse problem used by the elimination
// calculus: rows[r] maps col -> weight of entry (r, col), cols mirrors it.
// Weights that become exactly zero are erased so the view always matches
// what SparseMatrix would store.
struct ElimWorkspace {
    int n = 0;
    std::vector<std::map<int, double>> rows;
    std::vector<std::map<int, double>> cols;
    DenseVector f0;
    std::int64_t live = 0;

    static ElimWorkspace from(const FixedPointProblem& prob) {
        ElimWorkspace w;
        w.n = prob.size();
        w.rows.resize(w.n);
        w.cols.resize(w.n);
        w.f0 = prob.f0;
        for (const Triplet& t : prob.op.sparse.triplets()) {
            w.rows[t.row].emplace(t.col, t.value);
            w.cols[t.col].emplace(t.row, t.value);
            ++w.live;
        }
        return w;
    }

    double get(int r, int c) const {
        auto it = rows[r].find(c);
        return it == rows[r].end() ? 0.0 : it->second;
    }

    void put(int r, int c, double v) {
        if (v == 0.0) {
            live -= static_cast<std::int64_t>(rows[r].erase(c));
            cols[c].erase(r);
            return;
        }
        if (rows[r].insert_or_assign(c, v).second) ++live;
        cols[c].insert_or_assign(r, v);
    }

    SparseMatrix matrix() const {
        std::vector<Triplet> trips;
        trips.reserve(static_cast<std::size_t>(live));
        for (int r = 0; r < n; ++r)
            for (auto [c, v] : rows[r]) trips.push_back({r, c, v});
        return SparseMatrix::from_triplets(n, std::move(trips));
    }
};

void apply_diagonal(ElimWorkspace& w, int node, EliminationLog& log) {
    const double pii = w.get(node, node);
    log.steps.push_back(DiagonalElim{node, pii});
    if (pii == 0.0) return;
    const double scale = 1.0 / (1.0 - pii);
    w.put(node, node, 0.0);
    const std::vector<std::pair<int, double>> in(w.rows[node].begin(), w.rows[node].end());
    for (auto [src, v] : in) {
        w.put(node, src, v * scale);
        ++log.fill_in;
    }
    w.f0[node] *= scale;
}

void apply_link(ElimWorkspace& w, int from, int to, EliminationLog& log) {
    const double weight = w.get(to, from);
    log.steps.push_back(LinkElim{from, to, weight});
    w.put(to, from, 0.0);
    w.f0[to] += weight * w.f0[from];
    const std::vector<std::pair<int, double>> in(w.rows[from].begin(), w.rows[from].end());
    for (auto [src, v] : in) {
        w.put(to, src, w.get(to, src) + weight * v);
        ++log.fill_in;
    }
}

void require_sparse_only(const FixedPointProblem& prob, const char* who) {
    if (prob.op.rank_one)
        throw std::invalid_argument(std::string(who) +
                                    ": elimination requires an explicit sparse operator");
}

void require_node(const FixedPointProblem& prob, int node, const char* who) {
    if (node < 0 || node >= prob.size())
        throw std::invalid_argument(std::string(who) + ": node " + std::to_string(node) +
                                    " out of range");
}

}  // namespace

FixedPointProblem build_pc(const SparseMatrix& a, const DenseVector& b, double c) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("build_pc: c must be a positive finite scalar");
    const int n = a.size();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("build_pc: dimension mismatch between a and b");
    std::vector<Triplet> trips = a.triplets();
    for (Triplet& t : trips) t.value = -c * t.value;
    for (int i = 0; i < n; ++i) trips.push_back({i, i, 1.0});
    DenseVector f0(n);
    for (int i = 0; i < n; ++i) f0[i] = c * b[i];
    return FixedPointProblem(OperatorSpec(SparseMatrix::from_triplets(n, std::move(trips))),
                             std::move(f0));
}

FixedPointProblem build_q(const SparseMatrix& a, const DenseVector& b) {
    const int n = a.size();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("build_q: dimension mismatch between a and b");
    const std::vector<double> diag = diagonal_of(a, "build_q");
    std::vector<Triplet> trips;
    trips.reserve(a.triplets().size());
    for (const Triplet& t : a.triplets())
        if (t.row != t.col) trips.push_back({t.row, t.col, -t.value / diag[t.row]});
    DenseVector f0(n);
    for (int i = 0; i < n; ++i) f0[i] = b[i] / diag[i];
    return FixedPointProblem(OperatorSpec(SparseMatrix::from_triplets(n, std::move(trips))),
                             std::move(f0));
}

FixedPointProblem build_qprime(const SparseMatrix& a, const DenseVector& b) {
    const int n = a.size();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("build_qprime: dimension mismatch between a and b");
    std::vector<double> diag = diagonal_of(a, "build_qprime");
    std::vector<Triplet> trips;
    for (const Triplet& t : a.triplets())
        if (t.row != t.col) trips.push_back({t.row, t.col, -t.value / diag[t.col]});
    return FixedPointProblem(OperatorSpec(SparseMatrix::from_triplets(n, std::move(trips))), b,
                             std::move(diag));
}

FixedPointProblem build_pagerank(const SparseMatrix& p, double d, const DenseVector& v) {
    if (!(d > 0.0) || !(d < 1.0))
        throw std::invalid_argument("build_pagerank: damping must lie in (0, 1)");
    const int n = p.size();
    if (static_cast<int>(v.size()) != n)
        throw std::invalid_argument("build_pagerank: dimension mismatch between p and v");
    constexpr double kTol = 1e-12;
    for (int col = 0; col < n; ++col) {
        double sum = 0.0;
        for (double val : p.column_values(col)) {
            if (val < 0.0)
                throw std::invalid_argument("build_pagerank: negative entry in column " +
                                            std::to_string(col));
            sum += val;
        }
        if (sum > 1.0 + kTol)
            throw std::invalid_argument("build_pagerank: column " + std::to_string(col) +
                                        " sums to " + std::to_string(sum) + " > 1");
    }
    double vsum = 0.0;
    for (double x : v) {
        if (x < 0.0) throw std::invalid_argument("build_pagerank: v has a negative entry");
        vsum += x;
    }
    if (std::abs(vsum - 1.0) > kTol)
        throw std::invalid_argument("build_pagerank: v must sum to 1");

    std::vector<Triplet> trips = p.triplets();
    for (Triplet& t : trips) t.value = d * t.value;
    DenseVector f0(n);
    for (int i = 0; i < n; ++i) f0[i] = (1.0 - d) * v[i];
    return FixedPointProblem(OperatorSpec(SparseMatrix::from_triplets(n, std::move(trips))),
                             std::move(f0));
}

FixedPointProblem build_eigen_shift(const SparseMatrix& p, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("build_eigen_shift: alpha must be positive");
    require_stochastic_columns(p, "build_eigen_shift");
    const int n = p.size();
    if (n == 0) throw std::invalid_argument("build_eigen_shift: empty matrix");
    RankOne shift{-alpha / n, DenseVector(n, 1.0), DenseVector(n, 1.0)};
    return FixedPointProblem(OperatorSpec(p, std::move(shift)), DenseVector(n, 1.0 / n));
}

FixedPointProblem eliminate_diagonal(const FixedPointProblem& prob, int node,
                                     EliminationLog& log) {
    require_sparse_only(prob, "eliminate_diagonal");
    require_node(prob, node, "eliminate_diagonal");
    const double pii = prob.op.sparse.entry(node, node);
    if (pii >= 1.0)
        throw std::invalid_argument("eliminate_diagonal: self-loop weight " +
                                    std::to_string(pii) + " at node " + std::to_string(node) +
                                    " is >= 1 (divergent)");
    ElimWorkspace w = ElimWorkspace::from(prob);
    apply_diagonal(w, node, log);
    return FixedPointProblem(OperatorSpec(w.matrix()), std::move(w.f0), prob.recover_scale);
}

FixedPointProblem eliminate_link(const FixedPointProblem& prob, int from, int to,
                                 EliminationLog& log) {
    require_sparse_only(prob, "eliminate_link");
    require_node(prob, from, "eliminate_link");
    require_node(prob, to, "eliminate_link");
    if (from == to)
        throw std::invalid_argument("eliminate_link: use eliminate_diagonal for self-loops");
    if (prob.op.sparse.entry(from, from) != 0.0)
        throw std::invalid_argument("eliminate_link: node " + std::to_string(from) +
                                    " still has a self-loop; eliminate it first");
    if (prob.op.sparse.entry(to, from) == 0.0)
        throw std::invalid_argument("eliminate_link: no link from " + std::to_string(from) +
                                    " to " + std::to_string(to));
    ElimWorkspace w = ElimWorkspace::from(prob);
    apply_link(w, from, to, log);
    return FixedPointProblem(OperatorSpec(w.matrix()), std::move(w.f0), prob.recover_scale);
}

EliminateAllResult eliminate_all(const FixedPointProblem& prob, std::vector<int> order,
                                 double fill_guard_multiple) {
    require_sparse_only(prob, "eliminate_all");
    const int n = prob.size();
    if (order.empty()) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
    }
    if (static_cast<int>(order.size()) != n)
        throw std::invalid_argument("eliminate_all: order must cover every node once");
    std::vector<char> seen(n, 0);
    for (int node : order) {
        if (node < 0 || node >= n || seen[node])
            throw std::invalid_argument("eliminate_all: order is not a permutation of 0.." +
                                        std::to_string(n - 1));
        seen[node] = 1;
    }
    if (!(fill_guard_multiple > 0.0))
        throw std::invalid_argument("eliminate_all: fill guard multiple must be positive");

    EliminateAllResult res;
    ElimWorkspace w = ElimWorkspace::from(prob);
    const std::int64_t limit = static_cast<std::int64_t>(
        fill_guard_multiple * static_cast<double>(prob.op.sparse.nnz()));
    for (int node : order) {
        const double pii = w.get(node, node);
        if (pii >= 1.0) {
            res.diagnostic = "self-loop at node " + std::to_string(node) + " reached " +
                             std::to_string(pii) + " >= 1; elimination diverges";
            return res;
        }
        if (pii != 0.0) apply_diagonal(w, node, res.log);
        while (!w.cols[node].empty()) {
            const int to = w.cols[node].begin()->first;
            apply_link(w, node, to, res.log);
            if (w.live > limit) {
                res.diagnostic = "fill-in guard tripped: " + std::to_string(w.live) +
                                 " stored links exceeds " + std::to_string(limit) + " (" +
                                 std::to_string(fill_guard_multiple) + "x the original " +
                                 std::to_string(prob.op.sparse.nnz()) + ")";
                return res;
            }
        }
    }
    res.ok = true;
    res.solution = prob.recover(w.f0);
    return res;
}

FixedPointProblem replay(const FixedPointProblem& prob, const EliminationLog& log) {
    require_sparse_only(prob, "replay");
    ElimWorkspace w = ElimWorkspace::from(prob);
    EliminationLog scratch;
    for (const ElimStep& step : log.steps) {
        if (const auto* d = std::get_if<DiagonalElim>(&step)) {
            require_node(prob, d->node, "replay");
            const double current = w.get(d->node, d->node);
            if (current != d->old_weight)
                throw std::runtime_error("replay: self-loop at node " + std::to_string(d->node) +
                                         " does not match the recorded weight");
            if (current >= 1.0) throw std::runtime_error("replay: divergent self-loop");
            apply_diagonal(w, d->node, scratch);
        } else {
            const auto& l = std::get<LinkElim>(step);
            require_node(prob, l.from, "replay");
            require_node(prob, l.to, "replay");
            if (l.from == l.to || w.get(l.from, l.from) != 0.0)
                throw std::runtime_error("replay: malformed link step");
            if (w.get(l.to, l.from) != l.old_weight)
                throw std::runtime_error("replay: link (" + std::to_string(l.from) + " -> " +
                                         std::to_string(l.to) +
                                         ") does not match the recorded weight");
            apply_link(w, l.from, l.to, scratch);
        }
    }
    return FixedPointProblem(OperatorSpec(w.matrix()), std::move(w.f0), prob.recover_scale);
}

}  // namespace diter
