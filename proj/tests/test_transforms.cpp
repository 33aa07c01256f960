#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "diter/baselines.hpp"
#include "diter/transforms.hpp"
#include "support.hpp"

using namespace diter;

TEST_CASE("scaled form") {
    SUBCASE("identity at c = 1 becomes the empty operator") {
        FixedPointProblem p = build_pc(SparseMatrix::identity(3), {1.0, 2.0, 3.0}, 1.0);
        CHECK(p.op.sparse.nnz() == 0);
        CHECK(p.f0 == DenseVector{1.0, 2.0, 3.0});
        CHECK_FALSE(p.recover_scale.has_value());
    }
    SUBCASE("benchmark diagonal at c = 1/8") {
        FixedPointProblem p = build_pc(dtest::bench_matrix(), dtest::bench_b(), 0.125);
        CHECK(p.op.sparse.entry(0, 0) == 0.375);
        CHECK(p.op.sparse.entry(1, 1) == 0.125);
        CHECK(p.op.sparse.entry(2, 2) == 0.0);  // 1 - 8/8 drops out
        CHECK(p.op.sparse.entry(3, 3) == 0.625);
        CHECK(p.op.sparse.entry(0, 1) == -0.375);
        CHECK(p.op.sparse.out_degree(2) == 3);
        CHECK(p.op.sparse.nnz() == 10);
        CHECK(p.f0 == DenseVector(4, 0.125));
        CHECK(dtest::linf_diff(dtest::fixed_point_oracle(p), dtest::bench_solution()) <= 1e-12);
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(build_pc(SparseMatrix::identity(2), {1.0, 1.0}, 0.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_pc(SparseMatrix::identity(2), {1.0, 1.0}, -0.5),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_pc(SparseMatrix::identity(2), {1.0, 1.0}, std::nan("")),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_pc(SparseMatrix::identity(2), {1.0}, 0.5), std::invalid_argument);
    }
}

TEST_CASE("row-normalized form") {
    SUBCASE("diagonal system empties the operator") {
        SparseMatrix a = SparseMatrix::from_triplets(2, {{0, 0, 4.0}, {1, 1, -2.0}});
        FixedPointProblem p = build_q(a, {2.0, 3.0});
        CHECK(p.op.sparse.nnz() == 0);
        CHECK(p.f0 == DenseVector{0.5, -1.5});
    }
    SUBCASE("benchmark entries") {
        FixedPointProblem p = build_q(dtest::bench_matrix(), dtest::bench_b());
        CHECK(p.op.sparse.entry(0, 1) == -3.0 / 5.0);
        CHECK(p.op.sparse.entry(0, 2) == -2.0 / 5.0);
        CHECK(p.op.sparse.entry(1, 2) == 4.0 / 7.0);
        CHECK(p.op.sparse.entry(0, 0) == 0.0);
        CHECK(p.op.sparse.nnz() == 7);
        CHECK(p.f0[1] == 1.0 / 7.0);
        CHECK(dtest::linf_diff(dtest::fixed_point_oracle(p), dtest::bench_solution()) <= 1e-12);
    }
    SUBCASE("zero diagonal is rejected with its index") {
        SparseMatrix a = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 0, 2.0}});
        try {
            build_q(a, {1.0, 1.0});
            FAIL("expected a throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("index 1") != std::string::npos);
        }
    }
}

TEST_CASE("column-normalized form") {
    FixedPointProblem p = build_qprime(dtest::bench_matrix(), dtest::bench_b());
    CHECK(p.op.sparse.entry(0, 2) == -0.25);
    CHECK(p.op.sparse.entry(1, 2) == 0.5);
    CHECK(p.op.sparse.entry(3, 2) == -0.125);
    CHECK(p.f0 == dtest::bench_b());
    REQUIRE(p.recover_scale.has_value());
    CHECK(*p.recover_scale == DenseVector{5.0, 7.0, 8.0, 3.0});
    // The oracle undoes the diagonal scaling, so this is the original solution.
    CHECK(dtest::linf_diff(dtest::fixed_point_oracle(p), dtest::bench_solution()) <= 1e-12);
    CHECK_THROWS_AS(build_qprime(SparseMatrix::from_triplets(1, {}), {1.0}),
                    std::invalid_argument);
}

TEST_CASE("random walk form") {
    SUBCASE("empty graph yields (1-d)v directly") {
        FixedPointProblem p = build_pagerank(SparseMatrix::from_triplets(2, {}), 0.85,
                                             {0.5, 0.5});
        CHECK(p.op.sparse.nnz() == 0);
        CHECK(p.f0 == DenseVector(2, (1.0 - 0.85) * 0.5));
    }
    SUBCASE("two-node cycle splits the mass evenly") {
        SparseMatrix p = SparseMatrix::from_triplets(2, {{1, 0, 1.0}, {0, 1, 1.0}});
        FixedPointProblem prob = build_pagerank(p, 0.5, {0.5, 0.5});
        CHECK(prob.op.sparse.entry(1, 0) == 0.5);
        CHECK(dtest::linf_diff(dtest::fixed_point_oracle(prob), {0.5, 0.5}) <= 1e-14);
    }
    SUBCASE("dangling columns are allowed") {
        SparseMatrix p = SparseMatrix::from_triplets(2, {{1, 0, 1.0}});  // node 1 dangles
        CHECK_NOTHROW(build_pagerank(p, 0.85, {0.5, 0.5}));
    }
    SUBCASE("validation") {
        SparseMatrix cyc = SparseMatrix::from_triplets(2, {{1, 0, 1.0}, {0, 1, 1.0}});
        DenseVector v{0.5, 0.5};
        CHECK_THROWS_AS(build_pagerank(cyc, 0.0, v), std::invalid_argument);
        CHECK_THROWS_AS(build_pagerank(cyc, 1.0, v), std::invalid_argument);
        CHECK_THROWS_AS(build_pagerank(SparseMatrix::from_triplets(2, {{1, 0, -0.2}}), 0.85, v),
                        std::invalid_argument);
        CHECK_THROWS_AS(
            build_pagerank(SparseMatrix::from_triplets(2, {{0, 0, 0.8}, {1, 0, 0.4}}), 0.85, v),
            std::invalid_argument);
        CHECK_THROWS_AS(build_pagerank(cyc, 0.85, {0.5, -0.5}), std::invalid_argument);
        CHECK_THROWS_AS(build_pagerank(cyc, 0.85, {0.5, 0.4}), std::invalid_argument);
        CHECK_THROWS_AS(build_pagerank(cyc, 0.85, {1.0}), std::invalid_argument);
    }
}

TEST_CASE("shifted eigenvector form") {
    SUBCASE("2x2 stochastic example") {
        FixedPointProblem p = build_eigen_shift(dtest::stationary_example(), 1.0);
        REQUIRE(p.op.rank_one.has_value());
        CHECK(p.op.rank_one->sigma == -0.5);
        CHECK(p.op.rank_one->u == DenseVector(2, 1.0));
        CHECK(p.op.rank_one->v == DenseVector(2, 1.0));
        CHECK(p.f0 == DenseVector(2, 0.5));
        CHECK(p.op.sparse == dtest::stationary_example());
        CHECK(p.op.effective_entry(0, 0) == 0.0);
        CHECK(p.op.effective_entry(0, 1) == 0.5);
        CHECK(p.op.effective_entry(1, 1) == -0.5);
        CHECK(dtest::linf_diff(dtest::fixed_point_oracle(p), {2.0 / 3.0, 1.0 / 3.0}) <= 1e-14);
    }
    SUBCASE("single absorbing node") {
        FixedPointProblem p =
            build_eigen_shift(SparseMatrix::from_triplets(1, {{0, 0, 1.0}}), 1.0);
        CHECK(dtest::linf_diff(dtest::fixed_point_oracle(p), {1.0}) <= 1e-15);
    }
    SUBCASE("three-cycle stationary vector is uniform") {
        SparseMatrix p =
            SparseMatrix::from_triplets(3, {{1, 0, 1.0}, {2, 1, 1.0}, {0, 2, 1.0}});
        DenseVector x = dtest::fixed_point_oracle(build_eigen_shift(p, 1.0));
        CHECK(dtest::linf_diff(x, DenseVector(3, 1.0 / 3.0)) <= 1e-14);
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(build_eigen_shift(SparseMatrix::from_triplets(2, {{0, 0, 0.5}}), 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(
            build_eigen_shift(SparseMatrix::from_triplets(1, {{0, 0, 1.0}}), 0.0),
            std::invalid_argument);
        SparseMatrix neg =
            SparseMatrix::from_triplets(2, {{0, 0, -0.5}, {1, 0, 1.5}, {0, 1, 1.0}});
        CHECK_THROWS_AS(build_eigen_shift(neg, 1.0), std::invalid_argument);
    }
}

TEST_CASE("single elimination steps on the worked 2x2 system") {
    FixedPointProblem prob = dtest::running_example();
    EliminationLog log;

    FixedPointProblem e1 = eliminate_diagonal(prob, 0, log);
    CHECK(e1.op.sparse.entry(0, 0) == 0.0);
    CHECK(e1.op.sparse.entry(0, 1) == 0.4);  // 0.1 scaled by 1/(1 - 0.75), exactly
    CHECK(e1.f0 == DenseVector{4.0, 1.0});

    FixedPointProblem e2 = eliminate_link(e1, 0, 1, log);
    CHECK(e2.op.sparse.entry(1, 0) == 0.0);
    CHECK(e2.op.sparse.entry(1, 1) == 0.2);  // bypass 0.5 * 0.4
    CHECK(e2.f0 == DenseVector{4.0, 3.0});

    FixedPointProblem e3 = eliminate_diagonal(e2, 1, log);
    CHECK(e3.f0 == DenseVector{4.0, 3.75});

    FixedPointProblem e4 = eliminate_link(e3, 1, 0, log);
    CHECK(e4.op.sparse.nnz() == 0);
    CHECK(e4.f0 == DenseVector{5.5, 3.75});

    CHECK(log.steps.size() == 4);

    SUBCASE("the recorded log replays to the same terminal problem") {
        FixedPointProblem again = replay(prob, log);
        CHECK(again.op.sparse == e4.op.sparse);
        CHECK(again.f0 == e4.f0);
    }
    SUBCASE("replay refuses a perturbed starting point") {
        FixedPointProblem other(
            OperatorSpec(SparseMatrix::from_triplets(
                2, {{0, 0, 0.7}, {0, 1, 0.1}, {1, 0, 0.5}})),
            {1.0, 1.0});
        CHECK_THROWS_AS(replay(other, log), std::runtime_error);
    }
}

TEST_CASE("elimination step edge cases") {
    FixedPointProblem prob = dtest::running_example();
    EliminationLog log;
    SUBCASE("zero self-loop is a recorded no-op") {
        FixedPointProblem e = eliminate_diagonal(prob, 1, log);
        CHECK(e.op.sparse == prob.op.sparse);
        CHECK(e.f0 == prob.f0);
        CHECK(log.steps.size() == 1);
        CHECK(log.fill_in == 0);
    }
    SUBCASE("a divergent self-loop throws") {
        FixedPointProblem bad(
            OperatorSpec(SparseMatrix::from_triplets(1, {{0, 0, 1.5}})), {1.0});
        CHECK_THROWS_AS(eliminate_diagonal(bad, 0, log), std::invalid_argument);
    }
    SUBCASE("implicit operators cannot be rewritten") {
        FixedPointProblem shifted = build_eigen_shift(dtest::stationary_example(), 1.0);
        CHECK_THROWS_AS(eliminate_diagonal(shifted, 0, log), std::invalid_argument);
        CHECK_THROWS_AS(eliminate_link(shifted, 0, 1, log), std::invalid_argument);
        CHECK_THROWS_AS(eliminate_all(shifted), std::invalid_argument);
    }
    SUBCASE("link-step preconditions") {
        CHECK_THROWS_AS(eliminate_link(prob, 1, 1, log), std::invalid_argument);
        CHECK_THROWS_AS(eliminate_link(prob, 0, 1, log), std::invalid_argument);  // self-loop at 0
        FixedPointProblem clean = eliminate_diagonal(prob, 0, log);
        CHECK_THROWS_AS(eliminate_link(clean, 0, 0, log), std::invalid_argument);
        CHECK_THROWS_AS(eliminate_link(clean, 4, 0, log), std::invalid_argument);
        FixedPointProblem done = eliminate_link(clean, 0, 1, log);
        CHECK_THROWS_AS(eliminate_link(done, 0, 1, log), std::invalid_argument);  // already gone
    }
    SUBCASE("a source with no in-links forwards fluid without bypasses") {
        FixedPointProblem chain(
            OperatorSpec(SparseMatrix::from_triplets(2, {{1, 0, 0.5}})), {2.0, 3.0});
        FixedPointProblem e = eliminate_link(chain, 0, 1, log);
        CHECK(e.op.sparse.nnz() == 0);
        CHECK(e.f0 == DenseVector{2.0, 4.0});
        CHECK(log.fill_in == 0);
    }
}

TEST_CASE("full elimination") {
    SUBCASE("worked 2x2 system resolves exactly") {
        EliminateAllResult res = eliminate_all(dtest::running_example());
        REQUIRE(res.ok);
        CHECK(res.solution == DenseVector{5.5, 3.75});
        CHECK(res.log.steps.size() == 4);
        CHECK(res.log.fill_in == 2);
    }
    SUBCASE("reversed order reaches the same solution") {
        EliminateAllResult res = eliminate_all(dtest::running_example(), {1, 0});
        REQUIRE(res.ok);
        CHECK(dtest::linf_diff(res.solution, {5.5, 3.75}) <= 1e-12);
    }
    SUBCASE("acyclic operators eliminate without fill-in") {
        FixedPointProblem dag(OperatorSpec(SparseMatrix::from_triplets(
                                  3, {{1, 0, 0.5}, {2, 0, 0.25}, {2, 1, 0.5}})),
                              {1.0, 1.0, 1.0});
        EliminateAllResult res = eliminate_all(dag);
        REQUIRE(res.ok);
        CHECK(res.log.fill_in == 0);
        CHECK(res.solution == DenseVector{1.0, 1.5, 2.0});
    }
    SUBCASE("row-normalized random systems match dense elimination") {
        dtest::Rng rng(77);
        for (int it = 0; it < 50; ++it) {
            const int n = 2 + static_cast<int>(rng() % 7);
            SparseMatrix a = dtest::random_sdd(n, rng);
            DenseVector b = dtest::random_vector(n, rng);
            EliminateAllResult res = eliminate_all(build_q(a, b));
            REQUIRE(res.ok);
            CHECK(dtest::linf_diff(res.solution, dense_solve(a, b)) <= 1e-9);
        }
    }
    SUBCASE("column-normalized elimination lands in original coordinates") {
        EliminateAllResult res =
            eliminate_all(build_qprime(dtest::bench_matrix(), dtest::bench_b()));
        REQUIRE(res.ok);
        CHECK(dtest::linf_diff(res.solution, dtest::bench_solution()) <= 1e-12);
    }
    SUBCASE("fill guard aborts with a partial log") {
        std::vector<Triplet> trips;
        for (int c = 0; c < 3; ++c)
            for (int r = 0; r < 3; ++r)
                if (r != c) trips.push_back({r, c, 0.3});
        FixedPointProblem dense(OperatorSpec(SparseMatrix::from_triplets(3, std::move(trips))),
                                DenseVector(3, 1.0));
        EliminateAllResult res = eliminate_all(dense, {}, 0.1);
        CHECK_FALSE(res.ok);
        CHECK(res.diagnostic.find("guard") != std::string::npos);
        CHECK_FALSE(res.log.steps.empty());
    }
    SUBCASE("a unit 2-cycle collapses to a divergent self-loop") {
        FixedPointProblem loop(
            OperatorSpec(SparseMatrix::from_triplets(2, {{1, 0, 1.0}, {0, 1, 1.0}})),
            {1.0, 0.0});
        EliminateAllResult res = eliminate_all(loop);
        CHECK_FALSE(res.ok);
        CHECK(res.diagnostic.find("self-loop") != std::string::npos);
    }
    SUBCASE("order validation") {
        CHECK_THROWS_AS(eliminate_all(dtest::running_example(), {0}), std::invalid_argument);
        CHECK_THROWS_AS(eliminate_all(dtest::running_example(), {0, 0}), std::invalid_argument);
        CHECK_THROWS_AS(eliminate_all(dtest::running_example(), {0, 2}), std::invalid_argument);
        CHECK_THROWS_AS(eliminate_all(dtest::running_example(), {}, 0.0),
                        std::invalid_argument);
    }
}

TEST_CASE("diagonal elimination of the scaled form reproduces the row-normalized form") {
    SparseMatrix a = dtest::bench_matrix();
    DenseVector b = dtest::bench_b();
    FixedPointProblem q = build_q(a, b);
    FixedPointProblem p = build_pc(a, b, 0.125);
    EliminationLog log;
    for (int node = 0; node < 4; ++node) p = eliminate_diagonal(p, node, log);
    REQUIRE(p.op.sparse.nnz() == q.op.sparse.nnz());
    // Identical up to one rounding: the elimination multiplies by a computed
    // reciprocal where the direct build divides.
    std::vector<Triplet> qt = q.op.sparse.triplets();
    std::vector<Triplet> pt = p.op.sparse.triplets();
    for (std::size_t i = 0; i < qt.size(); ++i) {
        CHECK(qt[i].row == pt[i].row);
        CHECK(qt[i].col == pt[i].col);
        CHECK(pt[i].value == doctest::Approx(qt[i].value).epsilon(1e-15));
    }
    for (int i = 0; i < 4; ++i) CHECK(p.f0[i] == doctest::Approx(q.f0[i]).epsilon(1e-15));
}
