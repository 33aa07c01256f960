#include "diter/distsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace diter {

namespace {

constexpr std::int64_t kResyncInterval = 1 << 20;

std::vector<int> owners_for(int n, int k, PartitionStrategy strategy) {
    std::vector<int> owner(n);
    if (strategy == PartitionStrategy::Hash) {
        for (int i = 0; i < n; ++i) owner[i] = i % k;
        return owner;
    }
    const int base = n / k;
    const int rem = n % k;
    int next = 0;
    for (int w = 0; w < k; ++w) {
        const int take = base + (w < rem ? 1 : 0);
        for (int j = 0; j < take; ++j) owner[next++] = w;
    }
    return owner;
}

}  // namespace

PartitionPlan partition(const FixedPointProblem& prob, int k, PartitionStrategy strategy) {
    const int n = prob.size();
    if (k < 1 || k > n)
        throw std::invalid_argument("partition: worker count " + std::to_string(k) +
                                    " outside 1.." + std::to_string(n));
    if (prob.op.rank_one)
        throw std::invalid_argument(
            "partition: operators with an implicit rank-one part cannot be split by columns");

    PartitionPlan plan;
    plan.k = k;
    plan.owner = owners_for(n, k, strategy);
    plan.local_index.assign(n, -1);
    plan.workers.resize(k);
    for (int i = 0; i < n; ++i) {
        WorkerOp& w = plan.workers[plan.owner[i]];
        plan.local_index[i] = static_cast<int>(w.owned.size());
        w.owned.push_back(i);
    }

    for (int w = 0; w < k; ++w) {
        WorkerOp& wk = plan.workers[w];
        const int local_n = static_cast<int>(wk.owned.size());
        wk.remote.resize(local_n);
        std::vector<Triplet> local_trips;
        for (int l = 0; l < local_n; ++l) {
            const int g = wk.owned[l];
            auto rows = prob.op.sparse.column_rows(g);
            auto vals = prob.op.sparse.column_values(g);
            for (std::size_t t = 0; t < rows.size(); ++t) {
                if (plan.owner[rows[t]] == w)
                    local_trips.push_back({plan.local_index[rows[t]], l, vals[t]});
                else {
                    wk.remote[l].emplace_back(rows[t], vals[t]);
                    ++wk.remote_links;
                }
            }
        }
        wk.local = SparseMatrix::from_triplets(local_n, std::move(local_trips));
    }

    // The split must reassemble the operator exactly.
    std::vector<Triplet> rebuilt;
    rebuilt.reserve(static_cast<std::size_t>(prob.op.sparse.nnz()));
    for (int w = 0; w < k; ++w) {
        const WorkerOp& wk = plan.workers[w];
        for (const Triplet& t : wk.local.triplets())
            rebuilt.push_back({wk.owned[t.row], wk.owned[t.col], t.value});
        for (std::size_t l = 0; l < wk.remote.size(); ++l)
            for (auto [dst, val] : wk.remote[l]) rebuilt.push_back({dst, wk.owned[l], val});
    }
    if (!(SparseMatrix::from_triplets(n, std::move(rebuilt)) == prob.op.sparse))
        throw std::logic_error("partition: sub-operators failed to reassemble the operator");
    return plan;
}

SimResult simulate(const FixedPointProblem& prob, const PartitionPlan& plan,
                   const SimConfig& cfg, double tol, std::int64_t max_ticks) {
    const int n = prob.size();
    const int k = plan.k;
    if (k < 1 || static_cast<int>(plan.owner.size()) != n)
        throw std::invalid_argument("simulate: plan does not match the problem");
    if (cfg.batch < 1) throw std::invalid_argument("simulate: batch must be >= 1");
    if (cfg.delays.empty()) throw std::invalid_argument("simulate: need at least one delay");
    for (int d : cfg.delays)
        if (d < 0) throw std::invalid_argument("simulate: delays must be nonnegative");
    if (!(tol > 0.0) && max_ticks < 0)
        throw std::invalid_argument("simulate: need a positive tol or a tick budget");
    const std::size_t nsched = cfg.schedules.size();
    if (nsched > 1 && nsched != static_cast<std::size_t>(k))
        throw std::invalid_argument("simulate: schedule list must have 1 or k entries");

    // Per-worker local problems, states and schedules.
    std::vector<FixedPointProblem> local(k);
    std::vector<DiffusionState> state(k);
    std::vector<Schedule> sched(k, Schedule::cyclic());
    for (int w = 0; w < k; ++w) {
        const WorkerOp& wk = plan.workers[w];
        DenseVector f0(wk.owned.size());
        for (std::size_t l = 0; l < wk.owned.size(); ++l) f0[l] = prob.f0[wk.owned[l]];
        std::optional<DenseVector> scale;
        if (prob.recover_scale) {
            scale.emplace(wk.owned.size());
            for (std::size_t l = 0; l < wk.owned.size(); ++l)
                (*scale)[l] = (*prob.recover_scale)[wk.owned[l]];
        }
        local[w] = FixedPointProblem(OperatorSpec(wk.local), std::move(f0), std::move(scale));
        state[w] = init_state(local[w]);
        if (nsched == 1)
            sched[w] = cfg.schedules[0];
        else if (nsched > 1)
            sched[w] = cfg.schedules[w];
        sched[w].prepare(local[w]);
    }

    const DenseVector sums = column_abs_sums(prob.op);
    double rho = 0.0;
    for (double s : sums) rho = std::max(rho, s);
    const bool bounded = rho < 1.0;
    const std::int64_t sweep_cost = prob.op.sweep_link_cost();

    // Inboxes sorted by (deliver_tick, seq); same-link messages keep
    // emission order because a link's delay is fixed.
    std::vector<std::vector<FluidMessage>> inbox(k);
    std::int64_t in_flight = 0;
    std::int64_t seq = 0;

    std::mt19937_64 rng(cfg.seed);
    std::vector<int> order(k);
    for (int w = 0; w < k; ++w) order[w] = w;

    SimResult res;
    res.workers.resize(k);
    double global_r0 = 0.0;
    for (int w = 0; w < k; ++w) global_r0 += state[w].residual;

    auto global_residual = [&] {
        double r = 0.0;
        for (int w = 0; w < k; ++w) r += state[w].residual;
        return r;
    };
    auto total_steps = [&] {
        std::int64_t s = 0;
        for (int w = 0; w < k; ++w) s += state[w].step;
        return s;
    };
    auto total_cost = [&] {
        std::int64_t c = 0;
        for (int w = 0; w < k; ++w) c += state[w].link_cost;
        return c;
    };
    auto gauge_of = [&](double r) { return bounded ? r / (1.0 - rho) : r; };
    auto sample = [&](double r) {
        TraceRow row;
        row.step = total_steps();
        row.link_cost = total_cost();
        row.matvec_equiv =
            sweep_cost > 0 ? static_cast<double>(row.link_cost) / sweep_cost : 0.0;
        row.residual_l1 = r;
        row.error_bound = gauge_of(r);
        if (res.report.trace.rows.empty() || res.report.trace.rows.back().step != row.step)
            res.report.trace.rows.push_back(row);
    };
    auto conservation_defect = [&] {
        DenseVector f(n, 0.0), h(n, 0.0);
        for (int w = 0; w < k; ++w)
            for (std::size_t l = 0; l < plan.workers[w].owned.size(); ++l) {
                f[plan.workers[w].owned[l]] = state[w].f[l];
                h[plan.workers[w].owned[l]] = state[w].h[l];
            }
        for (int w = 0; w < k; ++w)
            for (const FluidMessage& m : inbox[w]) f[m.dst] += m.amount;
        const DenseVector ph = matvec(prob.op, h);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(f[i] + h[i] - ph[i] - prob.f0[i]));
        return worst;
    };

    std::vector<int> idle_streak(k, 0);
    std::int64_t tick = 0;
    bool done = false;
    while (!done) {
        if (tick % k == 0 && k > 1) {
            for (int i = k - 1; i > 0; --i) {
                const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
                std::swap(order[i], order[j]);
            }
        }

        if (in_flight == 0) {
            ++res.quiescent_checks;
            const double r = global_residual();
            if (cfg.check_conservation)
                res.max_conservation_defect =
                    std::max(res.max_conservation_defect, conservation_defect());
            sample(r);
            if (r == 0.0) {
                res.report.converged = true;
                done = true;
                break;
            }
            if (tol > 0.0 && gauge_of(r) <= tol) {
                res.report.converged = true;
                done = true;
                break;
            }
            if (global_r0 > 0.0 && r > 1e6 * global_r0) {
                res.report.diagnostic = "residual diverged past 1e6 x its initial value";
                done = true;
                break;
            }
        }
        if (max_ticks >= 0 && tick >= max_ticks) break;

        const int w = order[tick % k];
        const WorkerOp& wk = plan.workers[w];
        DiffusionState& st = state[w];

        std::int64_t delivered = 0;
        while (!inbox[w].empty() && inbox[w].front().deliver_tick <= tick) {
            const FluidMessage m = inbox[w].front();
            inbox[w].erase(inbox[w].begin());
            double& slot = st.f[plan.local_index[m.dst]];
            st.residual -= std::abs(slot);
            slot += m.amount;
            st.residual += std::abs(slot);
            --in_flight;
            ++delivered;
            ++res.workers[w].messages_in;
        }

        std::int64_t performed = 0;
        for (int b = 0; b < cfg.batch; ++b) {
            const int i = select_next(st, sched[w], local[w]);
            const double sent = diffuse(st, i, local[w].op);
            st.link_cost += static_cast<std::int64_t>(wk.remote[i].size());
            ++performed;
            if (sent != 0.0) {
                for (auto [dst, weight] : wk.remote[i]) {
                    const double amount = weight * sent;
                    if (amount == 0.0) continue;
                    FluidMessage m;
                    m.dst = dst;
                    m.amount = amount;
                    m.from_worker = w;
                    m.emit_tick = tick;
                    m.deliver_tick =
                        tick + cfg.delays[(wk.owned[i] + dst) % cfg.delays.size()];
                    m.seq = seq++;
                    const int target = plan.owner[dst];
                    auto pos = std::lower_bound(
                        inbox[target].begin(), inbox[target].end(), m,
                        [](const FluidMessage& a, const FluidMessage& b) {
                            return a.deliver_tick != b.deliver_tick
                                       ? a.deliver_tick < b.deliver_tick
                                       : a.seq < b.seq;
                        });
                    inbox[target].insert(pos, m);
                    ++in_flight;
                    ++res.workers[w].messages_out;
                }
            }
            idle_streak[w] = sent == 0.0 ? idle_streak[w] + 1 : 0;
            if (idle_streak[w] >= local[w].size()) {
                resync_residual(st);
                idle_streak[w] = 0;
            }
            if (st.step % kResyncInterval == 0) resync_residual(st);
        }

        res.ticks.push_back({tick, w, performed, delivered, st.residual});
        ++tick;
    }

    const double r = global_residual();
    DenseVector h(n, 0.0);
    for (int w = 0; w < k; ++w)
        for (std::size_t l = 0; l < plan.workers[w].owned.size(); ++l)
            h[plan.workers[w].owned[l]] = state[w].h[l];
    sample(r);
    res.report.solution = prob.recover(h);
    res.report.residual_l1 = r;
    res.report.bound = gauge_of(r);
    res.report.steps = total_steps();
    res.report.link_cost = total_cost();
    res.report.matvec_equiv =
        sweep_cost > 0 ? static_cast<double>(res.report.link_cost) / sweep_cost : 0.0;
    for (int w = 0; w < k; ++w) {
        res.workers[w].worker = w;
        res.workers[w].nodes = static_cast<int>(plan.workers[w].owned.size());
        res.workers[w].diffusions = state[w].step;
        res.workers[w].link_cost = state[w].link_cost;
        res.workers[w].residual = state[w].residual;
    }
    return res;
}

bool replay_check(const FixedPointProblem& prob, const PartitionPlan& plan,
                  const SimConfig& cfg, double tol, std::int64_t max_ticks) {
    const SimResult a = simulate(prob, plan, cfg, tol, max_ticks);
    const SimResult b = simulate(prob, plan, cfg, tol, max_ticks);
    if (a.report.converged != b.report.converged) return false;
    if (a.report.solution != b.report.solution) return false;
    if (a.ticks.size() != b.ticks.size()) return false;
    for (std::size_t i = 0; i < a.ticks.size(); ++i) {
        const TickRecord& x = a.ticks[i];
        const TickRecord& y = b.ticks[i];
        if (x.tick != y.tick || x.worker != y.worker || x.steps != y.steps ||
            x.delivered != y.delivered || x.worker_residual != y.worker_residual)
            return false;
    }
    if (a.report.trace.rows.size() != b.report.trace.rows.size()) return false;
    for (std::size_t i = 0; i < a.report.trace.rows.size(); ++i) {
        const TraceRow& x = a.report.trace.rows[i];
        const TraceRow& y = b.report.trace.rows[i];
        if (x.step != y.step || x.link_cost != y.link_cost ||
            x.residual_l1 != y.residual_l1 || x.error_bound != y.error_bound)
            return false;
    }
    return true;
}

}  // namespace diter
