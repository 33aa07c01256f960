#ifndef DITER_ENGINE_HPP
#define DITER_ENGINE_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "diter/core.hpp"

namespace diter {

/// Mutable state of one D-iteration run. `residual` tracks ‖f‖₁
/// incrementally (resync_residual recomputes it exactly); the trailing
/// fields are schedule-private bookkeeping.
struct DiffusionState {
    DenseVector f;
    DenseVector h;
    double residual = 0.0;
    std::int64_t step = 0;
    std::int64_t link_cost = 0;

    int cursor = 0;
    std::mt19937_64 rng;
    bool rng_seeded = false;
    std::vector<std::int64_t> last_selected;
};

/// Node-selection policy. The greedy kinds carry per-node weights bound
/// to one problem by prepare(); run() prepares its own copy, direct
/// select_next callers get lazy preparation.
class Schedule {
public:
    enum class Kind { Cyclic, GreedyAbs, GreedyDegree, GreedyReduction, RandomSeeded };

    static Schedule cyclic(bool skip_zero = true);
    static Schedule greedy_abs();
    static Schedule greedy_degree();
    static Schedule greedy_reduction();
    static Schedule random_seeded(std::uint64_t seed);

    Kind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    bool skip_zero() const { return skip_zero_; }
    bool prepared() const { return prepared_; }
    const DenseVector& weights() const { return weights_; }

    void prepare(const FixedPointProblem& prob);

private:
    Kind kind_ = Kind::Cyclic;
    std::uint64_t seed_ = 0;
    bool skip_zero_ = true;
    bool prepared_ = false;
    DenseVector weights_;
};

struct TraceRow {
    std::int64_t step = 0;
    std::int64_t link_cost = 0;
    double matvec_equiv = 0.0;
    double residual_l1 = 0.0;
    double error_bound = 0.0;
    std::optional<double> true_error;
};

struct Trace {
    std::vector<TraceRow> rows;
};

struct RunOptions {
    double tol = 1e-9;                       // target on the error gauge; <= 0 disables
    std::int64_t max_cost = -1;              // link-cost budget; < 0 disables
    std::int64_t trace_stride = 0;           // 0: first/last rows only
    std::int64_t resync_interval = 1 << 20;  // exact-residual refresh period
    std::optional<DenseVector> reference;    // fills the true_error trace column
};

struct SolveReport {
    DenseVector solution;
    bool converged = false;
    double residual_l1 = 0.0;
    double bound = 0.0;
    std::int64_t steps = 0;
    std::int64_t link_cost = 0;
    double matvec_equiv = 0.0;
    std::string diagnostic;  // nonempty when the run aborted
    Trace trace;
};

/// F = f0, H = 0, r = ‖f0‖₁, counters zeroed.
DiffusionState init_state(const FixedPointProblem& prob);

/// Diffuses node i: moves F_i into H_i and scatters it along the node's
/// effective out-links, maintaining the residual per touched entry.
/// Counters advance even when F_i = 0. Returns the amount moved.
double diffuse(DiffusionState& state, int i, const OperatorSpec& op);

/// Picks the next node per the schedule. A node holding fluid that has
/// not been selected for 10·n consecutive steps preempts the policy.
int select_next(DiffusionState& state, Schedule& schedule, const FixedPointProblem& prob);

/// r/(1−rho), an upper bound on ‖X − H‖₁. Requires rho < 1.
double error_bound(const DiffusionState& state, double rho);

/// Recomputes r = Σ|F_i| exactly, discarding accumulated drift.
void resync_residual(DiffusionState& state);

/// Full solve loop. Stops when the error gauge — r/(1−rho) when the
/// operator's largest column sum rho is below 1, the bare residual
/// otherwise — falls to opts.tol, or the link-cost budget runs out.
/// Aborts with a diagnostic when r exceeds 10⁶ × its initial value.
SolveReport run(const FixedPointProblem& prob, Schedule schedule, const RunOptions& opts = {});

}  // namespace diter

#endif
