// Command-line front end: solve / bench / check / eliminate / pagerank /
// distsim. Exit status: 0 converged (or check/eliminate succeeded),
// 1 not converged, 2 usage or I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "diter/conditions.hpp"
#include "diter/distsim.hpp"
#include "diter/experiment.hpp"
#include "diter/io.hpp"
#include "diter/transforms.hpp"

namespace {

using namespace diter;

std::string solution_line(const DenseVector& x) {
    std::string out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) out += ' ';
        out += format_number(x[i]);
    }
    return out;
}

struct InputOpts {
    std::string matrix_path;
    std::string b_path;
    bool fixed_point = false;
};

void add_input_options(CLI::App* cmd, InputOpts& in) {
    cmd->add_option("-m,--matrix", in.matrix_path,
                    "Matrix Market coordinate file: the system matrix A, or the operator P "
                    "with --fixed-point")
        ->required();
    cmd->add_option("-b,--b", in.b_path,
                    "right-hand side (or f0) vector, Matrix Market array format; default: all "
                    "ones");
    cmd->add_flag("--fixed-point", in.fixed_point,
                  "input is already the fixed-point form X = P.X + b");
}

std::pair<SparseMatrix, DenseVector> load_system(const InputOpts& in) {
    SparseMatrix a = read_matrix_market(in.matrix_path);
    DenseVector b = in.b_path.empty() ? DenseVector(a.size(), 1.0) : read_vector(in.b_path);
    if (static_cast<int>(b.size()) != a.size())
        throw std::runtime_error("vector " + in.b_path + " has " + std::to_string(b.size()) +
                                 " entries, matrix is " + std::to_string(a.size()) + "x" +
                                 std::to_string(a.size()));
    return {std::move(a), std::move(b)};
}

struct SolverKnobs {
    double tol = 1e-9;
    std::int64_t max_cost = -1;
    std::int64_t trace_stride = 1;
    double c = 0.0;
    double damping = 0.85;
    double alpha = 1.0;
    std::string v_path;
    bool no_true_error = false;
};

void add_solver_knobs(CLI::App* cmd, SolverKnobs& k) {
    cmd->add_option("--tol", k.tol, "stopping tolerance on the residual gauge");
    cmd->add_option("--max-cost", k.max_cost, "link-cost budget (-1: unlimited)");
    cmd->add_option("--stride", k.trace_stride, "trace sampling stride in diffusions/sweeps");
    cmd->add_option("--c", k.c, "scaling for the pc transform (0: 1/max|a_ij|)");
    cmd->add_option("--damping", k.damping, "damping factor for the pagerank transform");
    cmd->add_option("--alpha", k.alpha, "shift strength for the eigen transform");
    cmd->add_option("--v", k.v_path, "personalization vector file for the pagerank transform");
    cmd->add_flag("--no-true-error", k.no_true_error,
                  "skip the dense reference solve / true_error column");
}

ExperimentConfig make_config(const InputOpts& in, const SolverKnobs& k,
                             const std::vector<std::string>& methods) {
    ExperimentConfig cfg;
    auto [a, b] = load_system(in);
    cfg.matrix = std::move(a);
    cfg.rhs = std::move(b);
    cfg.fixed_point = in.fixed_point;
    for (const std::string& m : methods) cfg.methods.push_back(MethodSpec::parse(m));
    cfg.tol = k.tol;
    cfg.max_cost = k.max_cost;
    cfg.trace_stride = k.trace_stride;
    cfg.c = k.c;
    cfg.damping = k.damping;
    cfg.alpha = k.alpha;
    if (!k.v_path.empty()) cfg.personalization = read_vector(k.v_path);
    cfg.want_true_error = !k.no_true_error;
    return cfg;
}

std::string csv_name(const std::string& label) {
    std::string s = label;
    for (char& c : s)
        if (c == ':') c = '-';
    return s + ".csv";
}

void print_status(std::ostream& os, const MethodResult& m) {
    os << m.label << ": converged=" << (m.converged ? "yes" : "no") << " steps=" << m.steps
       << " link_cost=" << m.link_cost << " matvec_equiv=" << format_number(m.matvec_equiv)
       << " residual=" << format_number(m.residual);
    if (m.true_error >= 0.0) os << " true_error=" << format_number(m.true_error);
    if (!m.diagnostic.empty()) os << " (" << m.diagnostic << ")";
    os << '\n';
}

int run_solve(const InputOpts& in, const SolverKnobs& knobs, const std::string& method,
              const std::string& csv_path) {
    ExperimentConfig cfg = make_config(in, knobs, {method});
    ExperimentResult res = run_experiment(cfg);
    const MethodResult& m = res.methods.front();
    if (!csv_path.empty()) write_trace_csv(csv_path, m.label, m.trace);
    std::cout << solution_line(m.solution) << '\n';
    print_status(std::cerr, m);
    return m.converged ? 0 : 1;
}

int run_bench(const InputOpts& in, const SolverKnobs& knobs,
              const std::vector<std::string>& methods, const std::string& out_dir,
              bool gnuplot) {
    ExperimentConfig cfg = make_config(in, knobs, methods);
    ExperimentResult res = run_experiment(cfg);
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> csv_files;
    for (const MethodResult& m : res.methods) {
        const std::string path = (std::filesystem::path(out_dir) / csv_name(m.label)).string();
        write_trace_csv(path, m.label, m.trace);
        csv_files.push_back(path);
    }
    if (gnuplot)
        write_gnuplot_script((std::filesystem::path(out_dir) / "plot.gp").string(), csv_files,
                             (std::filesystem::path(out_dir) / "bench.png").string());
    std::cout << summary_table(res, cfg.tol);
    return res.all_converged ? 0 : 1;
}

std::string yes_no(const ConditionReport& r, const std::string& index_name) {
    if (r.satisfied) return "yes";
    std::string s = "no";
    if (r.witness)
        s += " (" + index_name + " " + std::to_string(*r.witness) + ", margin " +
             format_number(r.margins[*r.witness]) + ")";
    return s;
}

int run_check(const std::string& matrix_path, double alpha) {
    const SparseMatrix a = read_matrix_market(matrix_path);
    std::cout << "column-SDD: " << yes_no(is_sdd_columns(a), "column") << '\n';
    std::cout << "row-SDD: " << yes_no(is_sdd_rows(a), "row") << '\n';
    try {
        std::cout << "c-bound: " << format_number(theorem1_c_bound(a)) << '\n';
    } catch (const std::exception& e) {
        std::cout << "c-bound: undefined (" << e.what() << ")\n";
    }
    const OperatorSpec op(a);
    std::cout << "fluid-reduction: " << yes_no(fluid_reduction(op), "column") << '\n';
    std::cout << "weak-fluid-reduction: " << yes_no(weak_fluid_reduction(op), "column") << '\n';
    std::cout << "irreducible: " << (is_irreducible(a) ? "yes" : "no") << '\n';
    try {
        const Theorem2Report t2 = theorem2_check(a, alpha);
        std::cout << "theorem-2(alpha=" << format_number(alpha)
                  << "): strict " << (t2.strict.satisfied ? "yes" : "no") << ", weak "
                  << (t2.satisfied_weak ? "yes" : "no") << '\n';
    } catch (const std::exception& e) {
        std::cout << "theorem-2(alpha=" << format_number(alpha) << "): not applicable ("
                  << e.what() << ")\n";
    }
    return 0;
}

int run_eliminate(const InputOpts& in, const std::vector<int>& order, double fill_guard) {
    auto [a, b] = load_system(in);
    const FixedPointProblem prob = in.fixed_point
                                       ? FixedPointProblem(OperatorSpec(std::move(a)),
                                                           std::move(b))
                                       : build_q(a, b);
    EliminateAllResult res = eliminate_all(prob, order, fill_guard);
    if (!res.ok) {
        std::cerr << "error: " << res.diagnostic << '\n';
        return 1;
    }
    std::cout << solution_line(res.solution) << '\n';
    std::cerr << "eliminate: steps=" << res.log.steps.size() << " fill-in=" << res.log.fill_in
              << '\n';
    return 0;
}

int run_pagerank(const std::string& edges_path, double damping, const std::string& v_path,
                 double tol, std::int64_t max_cost, const std::string& schedule,
                 const std::string& csv_path, std::int64_t stride) {
    std::vector<int> dangling;
    const SparseMatrix p = read_edge_list(edges_path, WeightMode::Uniform, &dangling);
    if (!dangling.empty()) {
        std::cerr << "warning: dangling node(s) with zero out-degree:";
        for (int i : dangling) std::cerr << ' ' << i;
        std::cerr << " (residual bounds the error from above only)\n";
    }
    const int n = p.size();
    const DenseVector v = v_path.empty() ? DenseVector(n, 1.0 / n) : read_vector(v_path);
    const FixedPointProblem prob = build_pagerank(p, damping, v);
    const MethodSpec ms = MethodSpec::parse("diter:" + schedule);
    RunOptions opt;
    opt.tol = tol;
    opt.max_cost = max_cost;
    opt.trace_stride = stride;
    SolveReport rep = run(prob, ms.schedule, opt);
    if (!csv_path.empty()) write_trace_csv(csv_path, "diter:pagerank:" + schedule, rep.trace);
    std::cout << solution_line(rep.solution) << '\n';
    std::cerr << "pagerank: converged=" << (rep.converged ? "yes" : "no")
              << " steps=" << rep.steps << " link_cost=" << rep.link_cost
              << " residual=" << format_number(rep.residual_l1) << '\n';
    return rep.converged ? 0 : 1;
}

int run_distsim(const InputOpts& in, const std::string& transform, const std::string& schedule,
                int k, std::uint64_t seed, PartitionStrategy strategy,
                const std::vector<int>& delays, int batch, double tol, std::int64_t max_ticks,
                const SolverKnobs& knobs, bool do_replay_check) {
    auto [a, b] = load_system(in);
    std::optional<FixedPointProblem> prob;
    if (in.fixed_point) {
        prob.emplace(OperatorSpec(std::move(a)), std::move(b));
    } else if (transform == "pc") {
        prob = build_pc(a, b, knobs.c > 0.0 ? knobs.c : theorem1_c_bound(a));
    } else if (transform == "q") {
        prob = build_q(a, b);
    } else if (transform == "qprime") {
        prob = build_qprime(a, b);
    } else if (transform == "pagerank") {
        const DenseVector v = knobs.v_path.empty() ? DenseVector(a.size(), 1.0 / a.size())
                                                   : read_vector(knobs.v_path);
        prob = build_pagerank(a, knobs.damping, v);
    } else if (transform == "eigen") {
        prob = build_eigen_shift(a, knobs.alpha);
    } else {
        throw std::invalid_argument("unknown transform '" + transform +
                                    "' (pc|q|qprime|pagerank|eigen)");
    }

    const PartitionPlan plan = partition(*prob, k, strategy);
    SimConfig cfg;
    cfg.seed = seed;
    if (!delays.empty()) cfg.delays = delays;
    cfg.batch = batch;
    cfg.schedules = {MethodSpec::parse("diter:" + schedule).schedule};
    const SimResult sim = simulate(*prob, plan, cfg, tol, max_ticks);
    std::cout << solution_line(sim.report.solution) << '\n';
    std::cerr << "distsim: converged=" << (sim.report.converged ? "yes" : "no")
              << " ticks=" << sim.ticks.size() << " quiescent_checks=" << sim.quiescent_checks
              << " max_conservation_defect=" << format_number(sim.max_conservation_defect)
              << '\n';
    for (const WorkerStats& w : sim.workers)
        std::cerr << "  worker " << w.worker << ": nodes=" << w.nodes
                  << " diffusions=" << w.diffusions << " link_cost=" << w.link_cost
                  << " out=" << w.messages_out << " in=" << w.messages_in
                  << " residual=" << format_number(w.residual) << '\n';
    if (do_replay_check) {
        const bool same = replay_check(*prob, plan, cfg, tol,
                                       max_ticks < 0 ? 1000000 : max_ticks);
        std::cerr << "replay: " << (same ? "identical" : "MISMATCH") << '\n';
        if (!same) return 1;
    }
    return sim.report.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"D-iteration solver: fluid diffusion for sparse linear systems, PageRank and "
                 "stationary vectors"};
    app.require_subcommand(1);

    InputOpts in_solve, in_bench, in_elim, in_dist;
    SolverKnobs knobs_solve, knobs_bench, knobs_dist;

    auto* solve = app.add_subcommand("solve", "run one method and print the solution");
    std::string solve_method = "diter:q:cyclic";
    std::string solve_csv;
    add_input_options(solve, in_solve);
    add_solver_knobs(solve, knobs_solve);
    solve->add_option("--method", solve_method,
                      "jacobi | gauss-seidel | power | diter:<transform>:<schedule>");
    solve->add_option("--csv", solve_csv, "write the convergence trace here");

    auto* bench = app.add_subcommand("bench", "compare methods, emit CSV traces + cost table");
    std::vector<std::string> bench_methods = {"jacobi",
                                              "gauss-seidel",
                                              "power",
                                              "diter:q:cyclic",
                                              "diter:q:greedy-abs",
                                              "diter:qprime:greedy-reduction"};
    std::string bench_out = ".";
    bool bench_gnuplot = false;
    add_input_options(bench, in_bench);
    add_solver_knobs(bench, knobs_bench);
    bench->add_option("--methods", bench_methods, "methods to compare")->delimiter(',');
    bench->add_option("--out-dir", bench_out, "directory for the CSV traces");
    bench->add_flag("--gnuplot", bench_gnuplot, "also write a plot.gp script");

    auto* check = app.add_subcommand("check", "print convergence-condition reports");
    std::string check_matrix;
    double check_alpha = 1.0;
    check->add_option("-m,--matrix", check_matrix, "Matrix Market coordinate file")->required();
    check->add_option("--alpha", check_alpha, "shift strength for the column-counting check");

    auto* elim = app.add_subcommand("eliminate", "direct solve by exhaustive link elimination");
    std::vector<int> elim_order;
    double elim_guard = 50.0;
    add_input_options(elim, in_elim);
    elim->add_option("--order", elim_order, "node elimination order (default: ascending)")
        ->delimiter(',');
    elim->add_option("--fill-guard", elim_guard, "abort when links exceed this multiple of nnz");

    auto* pr = app.add_subcommand("pagerank", "PageRank from a TSV edge list");
    std::string pr_edges, pr_v, pr_csv;
    std::string pr_schedule = "cyclic";
    double pr_damping = 0.85, pr_tol = 1e-9;
    std::int64_t pr_max_cost = -1, pr_stride = 1;
    pr->add_option("--edges", pr_edges, "edge list, lines \"src\\tdst[\\tweight]\", 0-based")
        ->required();
    pr->add_option("-d,--damping", pr_damping, "damping factor");
    pr->add_option("--v", pr_v, "personalization vector file (default: uniform)");
    pr->add_option("--tol", pr_tol, "stopping tolerance");
    pr->add_option("--max-cost", pr_max_cost, "link-cost budget (-1: unlimited)");
    pr->add_option("--schedule", pr_schedule,
                   "cyclic | greedy-abs | greedy-degree | random:<seed>");
    pr->add_option("--csv", pr_csv, "write the convergence trace here");
    pr->add_option("--stride", pr_stride, "trace sampling stride");

    auto* dist = app.add_subcommand("distsim", "deterministic distributed simulation");
    std::string dist_transform = "q", dist_schedule = "cyclic";
    int dist_k = 2, dist_batch = 1;
    std::uint64_t dist_seed = 0;
    std::vector<int> dist_delays = {0};
    std::int64_t dist_max_ticks = -1;
    bool dist_replay = false;
    PartitionStrategy dist_strategy = PartitionStrategy::Contiguous;
    add_input_options(dist, in_dist);
    add_solver_knobs(dist, knobs_dist);
    dist->add_option("--transform", dist_transform,
                     "transform for linear-system inputs (pc|q|qprime|pagerank|eigen)");
    dist->add_option("--schedule", dist_schedule, "worker-local schedule");
    dist->add_option("-k,--k", dist_k, "number of workers");
    dist->add_option("--seed", dist_seed, "activation shuffle seed");
    dist->add_option("--strategy", dist_strategy, "node-to-worker assignment")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, PartitionStrategy>{{"contiguous", PartitionStrategy::Contiguous},
                                                     {"hash", PartitionStrategy::Hash}},
            CLI::ignore_case));
    dist->add_option("--delays", dist_delays, "link delay table in ticks")->delimiter(',');
    dist->add_option("--batch", dist_batch, "diffusions per activation");
    dist->add_option("--max-ticks", dist_max_ticks, "tick budget (-1: unlimited)");
    dist->add_flag("--replay-check", dist_replay, "rerun and verify bit-identical traces");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) return run_solve(in_solve, knobs_solve, solve_method, solve_csv);
        if (bench->parsed())
            return run_bench(in_bench, knobs_bench, bench_methods, bench_out, bench_gnuplot);
        if (check->parsed()) return run_check(check_matrix, check_alpha);
        if (elim->parsed()) return run_eliminate(in_elim, elim_order, elim_guard);
        if (pr->parsed())
            return run_pagerank(pr_edges, pr_damping, pr_v, pr_tol, pr_max_cost, pr_schedule,
                                pr_csv, pr_stride);
        if (dist->parsed())
            return run_distsim(in_dist, dist_transform, dist_schedule, dist_k, dist_seed,
                               dist_strategy, dist_delays, dist_batch, knobs_dist.tol,
                               dist_max_ticks, knobs_dist, dist_replay);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
