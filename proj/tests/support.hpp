#ifndef DITER_TESTS_SUPPORT_HPP
#define DITER_TESTS_SUPPORT_HPP

// Shared fixtures: the worked examples used across the suite plus seeded
// random problem generators. Everything deterministic.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "diter/baselines.hpp"
#include "diter/core.hpp"
#include "diter/transforms.hpp"

namespace dtest {

using namespace diter;
using Rng = std::mt19937_64;

inline double l1_diff(const DenseVector& a, const DenseVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

inline double linf_diff(const DenseVector& a, const DenseVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

// The 4x4 benchmark system: column-SDD, row 0 only weakly dominant.
inline SparseMatrix bench_matrix() {
    return SparseMatrix::from_triplets(4, {{0, 0, 5.0},
                                           {0, 1, 3.0},
                                           {0, 2, 2.0},
                                           {1, 1, 7.0},
                                           {1, 2, -4.0},
                                           {1, 3, 1.0},
                                           {2, 0, -2.0},
                                           {2, 2, 8.0},
                                           {3, 1, -2.0},
                                           {3, 2, 1.0},
                                           {3, 3, 3.0}});
}

inline DenseVector bench_b() { return DenseVector(4, 1.0); }

inline DenseVector bench_solution() {
    return {51.0 / 1090.0, 179.0 / 1090.0, 149.0 / 1090.0, 433.0 / 1090.0};
}

// 2x2 elimination walk-through: x0 = 0.75 x0 + 0.1 x1 + 1, x1 = 0.5 x0 + 1,
// whose solution is (5.5, 3.75).
inline FixedPointProblem running_example() {
    SparseMatrix p =
        SparseMatrix::from_triplets(2, {{0, 0, 0.75}, {0, 1, 0.1}, {1, 0, 0.5}});
    return FixedPointProblem(OperatorSpec(std::move(p)), {1.0, 1.0});
}

// 2x2 column-stochastic matrix with stationary vector [2/3, 1/3].
inline SparseMatrix stationary_example() {
    return SparseMatrix::from_triplets(2, {{0, 0, 0.5}, {0, 1, 1.0}, {1, 0, 0.5}});
}

inline DenseVector random_vector(int n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> val(lo, hi);
    DenseVector v(n);
    for (double& x : v) x = val(rng);
    return v;
}

// Column-SDD matrix with positive diagonal entries.
inline SparseMatrix random_sdd(int n, Rng& rng, double density = 0.5) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Triplet> trips;
    std::vector<double> off(n, 0.0);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) {
            if (r == c || unit(rng) >= density) continue;
            const double v = val(rng);
            if (v == 0.0) continue;
            trips.push_back({r, c, v});
            off[c] += std::abs(v);
        }
    for (int c = 0; c < n; ++c) trips.push_back({c, c, off[c] + 0.1 + unit(rng)});
    return SparseMatrix::from_triplets(n, std::move(trips));
}

// Operator whose column abs sums all land in (0, max_sum]; paired with a
// random f0. sign < 0 allows negative weights.
inline FixedPointProblem random_contractive(int n, Rng& rng, double max_sum = 0.9,
                                            double density = 0.4, bool nonneg = false) {
    std::uniform_real_distribution<double> val(nonneg ? 0.05 : -1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Triplet> trips;
    for (int c = 0; c < n; ++c) {
        std::vector<Triplet> col;
        double sum = 0.0;
        for (int r = 0; r < n; ++r) {
            if (unit(rng) >= density) continue;
            const double v = val(rng);
            if (v == 0.0) continue;
            col.push_back({r, c, v});
            sum += std::abs(v);
        }
        if (sum > 0.0) {
            const double target = max_sum * (0.3 + 0.7 * unit(rng));
            for (Triplet& t : col) t.value *= target / sum;
        }
        trips.insert(trips.end(), col.begin(), col.end());
    }
    DenseVector f0 = random_vector(n, rng, nonneg ? 0.0 : -1.0, 1.0);
    return FixedPointProblem(OperatorSpec(SparseMatrix::from_triplets(n, std::move(trips))),
                             std::move(f0));
}

// Column-stochastic matrix: each column gets between min_out and max_out
// distinct targets with uniform weights 1/k. No zero columns.
inline SparseMatrix random_stochastic(int n, Rng& rng, int min_out = 1, int max_out = 4) {
    std::uniform_int_distribution<int> deg(min_out, std::min(max_out, n));
    std::uniform_int_distribution<int> node(0, n - 1);
    std::vector<Triplet> trips;
    for (int c = 0; c < n; ++c) {
        const int k = deg(rng);
        std::vector<int> targets;
        while (static_cast<int>(targets.size()) < k) {
            const int t = node(rng);
            if (std::find(targets.begin(), targets.end(), t) == targets.end())
                targets.push_back(t);
        }
        for (int t : targets) trips.push_back({t, c, 1.0 / k});
    }
    return SparseMatrix::from_triplets(n, std::move(trips));
}

// Dense fixed-point oracle: solves (I - P_eff) x = f0 by Gaussian
// elimination (rank-one part densified) and applies recovery.
inline DenseVector fixed_point_oracle(const FixedPointProblem& prob) {
    const int n = prob.size();
    std::vector<Triplet> trips;
    for (int i = 0; i < n; ++i) trips.push_back({i, i, 1.0});
    for (const Triplet& t : prob.op.sparse.triplets()) trips.push_back({t.row, t.col, -t.value});
    if (prob.op.rank_one && prob.op.rank_one->sigma != 0.0) {
        const RankOne& r = *prob.op.rank_one;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = r.sigma * r.u[i] * r.v[j];
                if (v != 0.0) trips.push_back({i, j, -v});
            }
    }
    const DenseVector x = dense_solve(SparseMatrix::from_triplets(n, std::move(trips)), prob.f0);
    return prob.recover(x);
}

}  // namespace dtest

#endif
