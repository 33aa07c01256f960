#ifndef DITER_DISTSIM_HPP
#define DITER_DISTSIM_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "diter/core.hpp"
#include "diter/engine.hpp"

namespace diter {

enum class PartitionStrategy { Contiguous, Hash };

/// One worker's share of the operator: the owned columns split into a
/// local sub-matrix (both endpoints owned, local indices) and per-column
/// remote target lists (global destination, weight).
struct WorkerOp {
    std::vector<int> owned;  // global ids, ascending
    SparseMatrix local;
    std::vector<std::vector<std::pair<int, double>>> remote;
    std::int64_t remote_links = 0;
};

struct PartitionPlan {
    int k = 0;
    std::vector<int> owner;        // global node -> worker
    std::vector<int> local_index;  // global node -> slot in its worker
    std::vector<WorkerOp> workers;
};

/// Splits the problem across k workers. Contiguous carves balanced index
/// ranges, Hash assigns node i to worker i mod k. The split is verified
/// to reassemble the operator exactly. Requires 1 <= k <= n and an
/// explicit sparse operator.
PartitionPlan partition(const FixedPointProblem& prob, int k, PartitionStrategy strategy);

struct FluidMessage {
    int dst = 0;         // global node
    double amount = 0.0;  // never zero
    int from_worker = 0;
    std::int64_t emit_tick = 0;
    std::int64_t deliver_tick = 0;
    std::int64_t seq = 0;  // global emission order; makes delivery total
};

struct SimConfig {
    std::uint64_t seed = 0;
    std::vector<int> delays = {0};  // link lag in ticks: delays[(src + dst) % size]
    int batch = 1;                  // diffusions per worker activation
    // Empty: cyclic everywhere. One entry: shared by all workers. k
    // entries: per worker. Prepared against each worker's local problem.
    std::vector<Schedule> schedules;
    bool check_conservation = true;
};

struct WorkerStats {
    int worker = 0;
    int nodes = 0;
    std::int64_t diffusions = 0;
    std::int64_t link_cost = 0;
    std::int64_t messages_out = 0;
    std::int64_t messages_in = 0;
    double residual = 0.0;
};

struct TickRecord {
    std::int64_t tick = 0;
    int worker = 0;
    std::int64_t steps = 0;      // diffusions in this activation
    std::int64_t delivered = 0;  // messages drained
    double worker_residual = 0.0;
};

struct SimResult {
    SolveReport report;  // trace rows sampled at quiescent ticks
    std::vector<WorkerStats> workers;
    std::vector<TickRecord> ticks;
    double max_conservation_defect = 0.0;
    std::int64_t quiescent_checks = 0;
};

/// Deterministic discrete-event run: each tick activates one worker
/// (seeded shuffled round-robin), which drains its inbox into local
/// fluid, then performs up to cfg.batch diffusions; remote shares travel
/// as delayed messages. Convergence is judged on the summed residual at
/// quiescent ticks (no message in flight). With one worker, batch 1 and
/// zero delay this reproduces engine run() exactly.
SimResult simulate(const FixedPointProblem& prob, const PartitionPlan& plan,
                   const SimConfig& cfg, double tol, std::int64_t max_ticks = -1);

/// Runs simulate twice with identical configuration and compares traces,
/// tick records and solutions bit for bit.
bool replay_check(const FixedPointProblem& prob, const PartitionPlan& plan,
                  const SimConfig& cfg, double tol = 1e-8,
                  std::int64_t max_ticks = 1000000);

}  // namespace diter

#endif
