#include "diter/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diter {

namespace {

double max_column_sum(const OperatorSpec& op) {
    const DenseVector sums = column_abs_sums(op);
    double rho = 0.0;
    for (double s : sums) rho = std::max(rho, s);
    return rho;
}

}  // namespace

Schedule Schedule::cyclic(bool skip_zero) {
    Schedule s;
    s.kind_ = Kind::Cyclic;
    s.skip_zero_ = skip_zero;
    return s;
}

Schedule Schedule::greedy_abs() {
    Schedule s;
    s.kind_ = Kind::GreedyAbs;
    return s;
}

Schedule Schedule::greedy_degree() {
    Schedule s;
    s.kind_ = Kind::GreedyDegree;
    return s;
}

Schedule Schedule::greedy_reduction() {
    Schedule s;
    s.kind_ = Kind::GreedyReduction;
    return s;
}

Schedule Schedule::random_seeded(std::uint64_t seed) {
    Schedule s;
    s.kind_ = Kind::RandomSeeded;
    s.seed_ = seed;
    return s;
}

void Schedule::prepare(const FixedPointProblem& prob) {
    const int n = prob.size();
    switch (kind_) {
        case Kind::GreedyAbs:
            weights_.assign(n, 1.0);
            break;
        case Kind::GreedyDegree: {
            const Degrees deg = degrees(prob.op.sparse);
            weights_.resize(n);
            for (int i = 0; i < n; ++i)
                weights_[i] = 1.0 / (static_cast<double>(deg.in[i] + 1) * (deg.out[i] + 1));
            break;
        }
        case Kind::GreedyReduction: {
            if (!prob.recover_scale)
                throw std::invalid_argument(
                    "Schedule: the reduction-rate policy needs the column-normalized form "
                    "(a problem carrying recover_scale)");
            const Degrees deg = degrees(prob.op.sparse);
            const DenseVector sums = column_abs_sums(prob.op);
            weights_.resize(n);
            for (int i = 0; i < n; ++i)
                weights_[i] = (1.0 - sums[i]) /
                              (static_cast<double>(deg.in[i] + 1) * (deg.out[i] + 1));
            break;
        }
        case Kind::Cyclic:
        case Kind::RandomSeeded:
            weights_.clear();
            break;
    }
    prepared_ = true;
}

DiffusionState init_state(const FixedPointProblem& prob) {
    DiffusionState st;
    st.f = prob.f0;
    st.h.assign(prob.size(), 0.0);
    st.residual = l1_norm(st.f);
    st.last_selected.assign(prob.size(), 0);
    return st;
}

double diffuse(DiffusionState& state, int i, const OperatorSpec& op) {
    const int n = op.size();
    if (i < 0 || i >= n) throw std::out_of_range("diffuse: node index out of range");
    state.step += 1;
    state.link_cost += op.sparse.out_degree(i);
    if (op.rank_one) state.link_cost += n;

    const double sent = state.f[i];
    if (sent == 0.0) return sent;

    state.h[i] += sent;
    state.f[i] = 0.0;
    state.residual -= std::abs(sent);

    auto rows = op.sparse.column_rows(i);
    auto vals = op.sparse.column_values(i);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        double& fj = state.f[rows[k]];
        state.residual -= std::abs(fj);
        fj += vals[k] * sent;
        state.residual += std::abs(fj);
    }
    if (op.rank_one) {
        const double coef = op.rank_one->sigma * op.rank_one->v[i] * sent;
        if (coef != 0.0) {
            for (int j = 0; j < n; ++j) {
                double& fj = state.f[j];
                state.residual -= std::abs(fj);
                fj += coef * op.rank_one->u[j];
                state.residual += std::abs(fj);
            }
        }
    }
    return sent;
}

int select_next(DiffusionState& state, Schedule& schedule, const FixedPointProblem& prob) {
    const int n = prob.size();
    if (n == 0) throw std::invalid_argument("select_next: empty problem");
    if (!schedule.prepared()) schedule.prepare(prob);

    int pick = -1;
    const std::int64_t stale = 10 * static_cast<std::int64_t>(n);
    for (int i = 0; i < n; ++i) {
        if (state.f[i] != 0.0 && state.step - state.last_selected[i] >= stale) {
            pick = i;
            break;
        }
    }

    if (pick < 0) {
        switch (schedule.kind()) {
            case Schedule::Kind::Cyclic: {
                pick = state.cursor;
                if (schedule.skip_zero()) {
                    for (int probe = 0; probe < n; ++probe) {
                        const int cand = (state.cursor + probe) % n;
                        if (state.f[cand] != 0.0) {
                            pick = cand;
                            break;
                        }
                    }
                }
                state.cursor = (pick + 1) % n;
                break;
            }
            case Schedule::Kind::GreedyAbs:
            case Schedule::Kind::GreedyDegree:
            case Schedule::Kind::GreedyReduction: {
                const DenseVector& w = schedule.weights();
                pick = 0;
                double best = std::abs(state.f[0]) * w[0];
                for (int i = 1; i < n; ++i) {
                    const double score = std::abs(state.f[i]) * w[i];
                    if (score > best) {
                        best = score;
                        pick = i;
                    }
                }
                break;
            }
            case Schedule::Kind::RandomSeeded: {
                if (!state.rng_seeded) {
                    state.rng.seed(schedule.seed());
                    state.rng_seeded = true;
                }
                int live = 0;
                for (int i = 0; i < n; ++i)
                    if (state.f[i] != 0.0) ++live;
                if (live == 0) {
                    pick = 0;
                    break;
                }
                int target = static_cast<int>(state.rng() % static_cast<std::uint64_t>(live));
                for (int i = 0; i < n; ++i) {
                    if (state.f[i] != 0.0 && target-- == 0) {
                        pick = i;
                        break;
                    }
                }
                break;
            }
        }
    }

    state.last_selected[pick] = state.step;
    return pick;
}

double error_bound(const DiffusionState& state, double rho) {
    if (!(rho >= 0.0) || rho >= 1.0)
        throw std::invalid_argument("error_bound: needs 0 <= rho < 1 (no bound otherwise)");
    return state.residual / (1.0 - rho);
}

void resync_residual(DiffusionState& state) { state.residual = l1_norm(state.f); }

SolveReport run(const FixedPointProblem& prob, Schedule schedule, const RunOptions& opts) {
    if (!(opts.tol > 0.0) && opts.max_cost < 0)
        throw std::invalid_argument("run: need a positive tol or a link-cost budget");
    const int n = prob.size();
    if (opts.reference && static_cast<int>(opts.reference->size()) != n)
        throw std::invalid_argument("run: reference dimension mismatch");

    schedule.prepare(prob);
    const double rho = max_column_sum(prob.op);
    const bool bounded = rho < 1.0;
    const std::int64_t sweep_cost = prob.op.sweep_link_cost();

    DiffusionState state = init_state(prob);
    const double r0 = state.residual;

    SolveReport report;
    auto gauge = [&] { return bounded ? state.residual / (1.0 - rho) : state.residual; };
    auto sample = [&] {
        TraceRow row;
        row.step = state.step;
        row.link_cost = state.link_cost;
        row.matvec_equiv =
            sweep_cost > 0 ? static_cast<double>(state.link_cost) / sweep_cost : 0.0;
        row.residual_l1 = state.residual;
        row.error_bound = gauge();
        if (opts.reference) {
            DenseVector diff = prob.recover(state.h);
            for (int i = 0; i < n; ++i) diff[i] -= (*opts.reference)[i];
            row.true_error = l1_norm(diff);
        }
        report.trace.rows.push_back(std::move(row));
    };

    sample();
    int idle_streak = 0;
    while (true) {
        if (state.residual == 0.0) {
            report.converged = true;
            break;
        }
        if (opts.tol > 0.0 && gauge() <= opts.tol) {
            report.converged = true;
            break;
        }
        if (opts.max_cost >= 0 && state.link_cost >= opts.max_cost) break;
        if (r0 > 0.0 && state.residual > 1e6 * r0) {
            report.diagnostic = "residual diverged past 1e6 x its initial value";
            break;
        }

        const int node = select_next(state, schedule, prob);
        const double sent = diffuse(state, node, prob.op);

        // A full window of zero-fluid no-ops means the incremental residual
        // is pure drift; refresh it so the loop can terminate.
        idle_streak = sent == 0.0 ? idle_streak + 1 : 0;
        if (idle_streak >= n) {
            resync_residual(state);
            idle_streak = 0;
        }
        if (opts.resync_interval > 0 && state.step % opts.resync_interval == 0)
            resync_residual(state);
        if (opts.trace_stride > 0 && state.step % opts.trace_stride == 0) sample();
    }

    if (report.trace.rows.empty() || report.trace.rows.back().step != state.step) sample();
    report.solution = prob.recover(state.h);
    report.residual_l1 = state.residual;
    report.bound = gauge();
    report.steps = state.step;
    report.link_cost = state.link_cost;
    report.matvec_equiv =
        sweep_cost > 0 ? static_cast<double>(state.link_cost) / sweep_cost : 0.0;
    return report;
}

}  // namespace diter
