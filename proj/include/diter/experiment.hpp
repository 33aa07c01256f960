#ifndef DITER_EXPERIMENT_HPP
#define DITER_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diter/core.hpp"
#include "diter/engine.hpp"

namespace diter {

/// One method selector, parsed from strings like "jacobi",
/// "gauss-seidel", "power", "diter:q:cyclic",
/// "diter:qprime:greedy-reduction", "diter:pagerank:random:42". A
/// two-part "diter:<schedule>" targets a problem supplied directly in
/// fixed-point form.
struct MethodSpec {
    enum class Family { Jacobi, GaussSeidel, Power, Diter };
    enum class Transform { None, PC, Q, QPrime, PageRank, Eigen };

    std::string label;
    Family family = Family::Jacobi;
    Transform transform = Transform::None;
    Schedule schedule = Schedule::cyclic();

    static MethodSpec parse(const std::string& text);
};

struct ExperimentConfig {
    SparseMatrix matrix;  // the system matrix A, or the operator P
    DenseVector rhs;      // B, or f0 in fixed-point form
    bool fixed_point = false;

    std::vector<MethodSpec> methods;
    double tol = 1e-9;
    std::int64_t max_cost = -1;
    std::int64_t trace_stride = 1;
    int max_iter = 1000000;  // sweep cap for the baseline methods

    double c = 0.0;  // P(c) scaling; 0 picks the Theorem-1 style bound 1/max|a_ij|
    double damping = 0.85;
    DenseVector personalization;  // empty: uniform
    double alpha = 1.0;

    std::optional<DenseVector> reference;  // else derived by dense solve when feasible
    bool want_true_error = true;
};

struct MethodResult {
    std::string label;
    bool converged = false;
    std::int64_t steps = 0;
    std::int64_t link_cost = 0;
    double matvec_equiv = 0.0;
    double residual = 0.0;           // final residual/bound gauge
    double true_error = -1.0;        // L1 distance to the reference; -1 unknown
    std::int64_t cost_to_tol = -1;   // link cost when residual_l1 first reached tol
    DenseVector solution;
    std::string diagnostic;
    Trace trace;
};

struct ExperimentResult {
    std::vector<MethodResult> methods;
    bool all_converged = false;
};

/// Builds every requested problem up front (so incompatible method /
/// transform combinations are reported before anything runs), executes
/// each method, and collects per-method traces and cost summaries.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Plain-text cost table for terminal output.
std::string summary_table(const ExperimentResult& result, double tol);

}  // namespace diter

#endif
