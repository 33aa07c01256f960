#include "diter/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "diter/baselines.hpp"
#include "diter/conditions.hpp"
#include "diter/transforms.hpp"

namespace diter {

namespace {

using Family = MethodSpec::Family;
using Transform = MethodSpec::Transform;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

Schedule parse_schedule(const std::string& label, const std::vector<std::string>& parts,
                        std::size_t from) {
    if (from >= parts.size()) return Schedule::cyclic();
    const std::string& name = parts[from];
    const bool last = from + 1 == parts.size();
    if (name == "cyclic" && last) return Schedule::cyclic();
    if (name == "greedy-abs" && last) return Schedule::greedy_abs();
    if (name == "greedy-degree" && last) return Schedule::greedy_degree();
    if (name == "greedy-reduction" && last) return Schedule::greedy_reduction();
    if (name == "random") {
        if (from + 2 != parts.size())
            throw std::invalid_argument(label + ": random schedule needs a seed (random:<seed>)");
        try {
            return Schedule::random_seeded(std::stoull(parts[from + 1]));
        } catch (const std::exception&) {
            throw std::invalid_argument(label + ": bad random seed '" + parts[from + 1] + "'");
        }
    }
    throw std::invalid_argument(label + ": unknown schedule '" + name + "'");
}

bool is_transform_token(const std::string& t) {
    return t == "pc" || t == "q" || t == "qprime" || t == "pagerank" || t == "eigen";
}

Transform transform_from(const std::string& t) {
    if (t == "pc") return Transform::PC;
    if (t == "q") return Transform::Q;
    if (t == "qprime") return Transform::QPrime;
    if (t == "pagerank") return Transform::PageRank;
    return Transform::Eigen;
}

DenseVector uniform_vector(int n) { return DenseVector(n, 1.0 / n); }

// Densifies I - P (including any rank-one part) and solves for the fixed
// point, applying the problem's recovery scaling.
DenseVector dense_fixed_point(const FixedPointProblem& prob) {
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

struct Planned {
    MethodSpec spec;
    std::optional<FixedPointProblem> problem;  // absent for jacobi / gauss-seidel
};

}  // namespace

MethodSpec MethodSpec::parse(const std::string& text) {
    MethodSpec m;
    m.label = text;
    const std::vector<std::string> parts = split(text, ':');
    if (parts[0] == "jacobi" || parts[0] == "gauss-seidel" || parts[0] == "power") {
        if (parts.size() != 1)
            throw std::invalid_argument(text + ": this method takes no qualifier");
        m.family = parts[0] == "jacobi"         ? Family::Jacobi
                   : parts[0] == "gauss-seidel" ? Family::GaussSeidel
                                                : Family::Power;
        return m;
    }
    if (parts[0] != "diter") throw std::invalid_argument("unknown method '" + text + "'");
    m.family = Family::Diter;
    std::size_t next = 1;
    if (parts.size() > 1 && is_transform_token(parts[1])) {
        m.transform = transform_from(parts[1]);
        next = 2;
    }
    m.schedule = parse_schedule(text, parts, next);
    return m;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.methods.empty()) throw std::invalid_argument("experiment: no methods requested");
    if (!(cfg.tol > 0.0) && cfg.max_cost < 0)
        throw std::invalid_argument("experiment: need tol > 0 or a link-cost budget");
    const int n = cfg.matrix.size();
    if (static_cast<int>(cfg.rhs.size()) != n)
        throw std::invalid_argument("experiment: rhs dimension mismatch");

    auto c_eff = [&] { return cfg.c > 0.0 ? cfg.c : theorem1_c_bound(cfg.matrix); };

    // Build every problem first: incompatibilities surface before any run.
    std::vector<Planned> planned;
    for (const MethodSpec& m : cfg.methods) {
        Planned pm{m, std::nullopt};
        switch (m.family) {
            case Family::Jacobi:
            case Family::GaussSeidel:
                if (cfg.fixed_point)
                    throw std::invalid_argument(
                        m.label + ": needs the linear system, not a fixed-point input");
                break;
            case Family::Power:
                pm.problem = cfg.fixed_point
                                 ? FixedPointProblem(OperatorSpec(cfg.matrix), cfg.rhs)
                                 : build_pc(cfg.matrix, cfg.rhs, c_eff());
                break;
            case Family::Diter:
                if (cfg.fixed_point) {
                    if (m.transform != Transform::None)
                        throw std::invalid_argument(
                            m.label + ": input is already in fixed-point form");
                    pm.problem = FixedPointProblem(OperatorSpec(cfg.matrix), cfg.rhs);
                } else {
                    switch (m.transform) {
                        case Transform::None:
                            throw std::invalid_argument(
                                m.label +
                                ": pick a transform (pc|q|qprime|pagerank|eigen) for a "
                                "linear-system input");
                        case Transform::PC:
                            pm.problem = build_pc(cfg.matrix, cfg.rhs, c_eff());
                            break;
                        case Transform::Q:
                            pm.problem = build_q(cfg.matrix, cfg.rhs);
                            break;
                        case Transform::QPrime:
                            pm.problem = build_qprime(cfg.matrix, cfg.rhs);
                            break;
                        case Transform::PageRank:
                            pm.problem = build_pagerank(
                                cfg.matrix, cfg.damping,
                                cfg.personalization.empty() ? uniform_vector(n)
                                                            : cfg.personalization);
                            break;
                        case Transform::Eigen:
                            pm.problem = build_eigen_shift(cfg.matrix, cfg.alpha);
                            break;
                    }
                }
                if (m.schedule.kind() == Schedule::Kind::GreedyReduction &&
                    !pm.problem->recover_scale)
                    throw std::invalid_argument(m.label +
                                                ": greedy-reduction needs the qprime transform");
                break;
        }
        planned.push_back(std::move(pm));
    }

    auto reference_for = [&](const Planned& pm) -> std::optional<DenseVector> {
        if (cfg.reference) return cfg.reference;
        if (!cfg.want_true_error || n > 10000) return std::nullopt;
        try {
            if (pm.problem) return dense_fixed_point(*pm.problem);
            return dense_solve(cfg.matrix, cfg.rhs);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };

    const double base_tol = cfg.tol > 0.0 ? cfg.tol : 1e-12;
    auto sweeps_allowed = [&](std::int64_t sweep_cost) {
        if (cfg.max_cost < 0 || sweep_cost <= 0) return cfg.max_iter;
        const std::int64_t cap = cfg.max_cost / sweep_cost + 1;
        return static_cast<int>(std::min<std::int64_t>(cap, cfg.max_iter));
    };

    ExperimentResult result;
    result.all_converged = true;
    for (const Planned& pm : planned) {
        const std::optional<DenseVector> ref = reference_for(pm);
        const DenseVector* refp = ref ? &*ref : nullptr;
        MethodResult r;
        r.label = pm.spec.label;
        switch (pm.spec.family) {
            case Family::Jacobi:
            case Family::GaussSeidel: {
                const std::int64_t sweep = cfg.matrix.nnz() - n;
                const int iters = sweeps_allowed(sweep);
                IterationReport rep =
                    pm.spec.family == Family::Jacobi
                        ? jacobi(cfg.matrix, cfg.rhs, base_tol, iters, refp)
                        : gauss_seidel(cfg.matrix, cfg.rhs, base_tol, iters, refp);
                r.converged = rep.converged;
                r.steps = rep.iterations;
                r.link_cost = rep.link_cost;
                r.matvec_equiv = rep.matvec_equiv;
                r.residual = rep.residual;
                r.diagnostic = rep.diagnostic;
                r.solution = std::move(rep.solution);
                r.trace = std::move(rep.trace);
                break;
            }
            case Family::Power: {
                IterationReport rep = power_affine(
                    *pm.problem, base_tol, sweeps_allowed(pm.problem->op.sweep_link_cost()),
                    refp);
                r.converged = rep.converged;
                r.steps = rep.iterations;
                r.link_cost = rep.link_cost;
                r.matvec_equiv = rep.matvec_equiv;
                r.residual = rep.residual;
                r.diagnostic = rep.diagnostic;
                r.solution = std::move(rep.solution);
                r.trace = std::move(rep.trace);
                break;
            }
            case Family::Diter: {
                RunOptions o;
                o.tol = cfg.tol;
                o.max_cost = cfg.max_cost;
                o.trace_stride = cfg.trace_stride;
                o.reference = ref;
                SolveReport rep = run(*pm.problem, pm.spec.schedule, o);
                r.converged = rep.converged;
                r.steps = rep.steps;
                r.link_cost = rep.link_cost;
                r.matvec_equiv = rep.matvec_equiv;
                r.residual = rep.bound;
                r.diagnostic = rep.diagnostic;
                r.solution = std::move(rep.solution);
                r.trace = std::move(rep.trace);
                break;
            }
        }
        if (refp) {
            double d = 0.0;
            for (int i = 0; i < n; ++i) d += std::abs(r.solution[i] - (*refp)[i]);
            r.true_error = d;
        }
        if (cfg.tol > 0.0) {
            for (const TraceRow& row : r.trace.rows) {
                if (row.residual_l1 <= cfg.tol) {
                    r.cost_to_tol = row.link_cost;
                    break;
                }
            }
        }
        result.all_converged = result.all_converged && r.converged;
        result.methods.push_back(std::move(r));
    }
    return result;
}

std::string summary_table(const ExperimentResult& result, double tol) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-32s %-9s %10s %12s %13s %13s %13s %12s\n", "method",
                  "converged", "steps", "link_cost", "matvec_equiv", "residual", "true_error",
                  "cost_to_tol");
    out << line;
    for (const MethodResult& m : result.methods) {
        std::snprintf(line, sizeof(line), "%-32s %-9s %10lld %12lld %13.4g %13.4g %13.4g %12lld\n",
                      m.label.c_str(), m.converged ? "yes" : "no",
                      static_cast<long long>(m.steps), static_cast<long long>(m.link_cost),
                      m.matvec_equiv, m.residual, m.true_error,
                      static_cast<long long>(m.cost_to_tol));
        out << line;
    }
    std::snprintf(line, sizeof(line), "(cost_to_tol: link cost when residual_l1 first <= %g)\n",
                  tol);
    out << line;
    return out.str();
}

}  // namespace diter
