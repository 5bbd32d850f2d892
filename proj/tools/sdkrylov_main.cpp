// sdkrylov command-line front end: generate benchmark systems, run any
// solver/preconditioner combination, print condition reports, and reproduce
// the reference tables as CSV/markdown.
//
// Exit codes: 0 converged/ok, 2 invalid flags, 3 I/O failure,
// 4 iteration limit, 5 breakdown/divergence, 6 not positive definite.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sdkrylov/sdkrylov.hpp"

namespace {

using namespace sdkrylov;

constexpr int kExitOk = 0;
constexpr int kExitBadFlags = 2;
constexpr int kExitIo = 3;
constexpr int kExitMaxIterations = 4;
constexpr int kExitBreakdown = 5;
constexpr int kExitNotPositiveDefinite = 6;

int status_exit_code(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return kExitOk;
        case SolveStatus::MaxIterations:
        case SolveStatus::Stagnated: return kExitMaxIterations;
        case SolveStatus::Breakdown:
        case SolveStatus::Diverged: return kExitBreakdown;
    }
    return kExitOk;
}

std::string format_iter(double v) {
    char buf[32];
    if (v == std::floor(v))
        std::snprintf(buf, sizeof(buf), "%.0f", v);
    else
        std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

/// --pc values: selfdual | normal | alpha=<v> | beta=<v> | combined=<a>,<b>
/// | shifted=<a>[,<b>]
std::optional<PreconditionerSpec> parse_pc(const std::string& s) {
    if (s == "selfdual") return PreconditionerSpec::self_dual();
    if (s == "normal") return PreconditionerSpec::normal_equations();
    const auto eq = s.find('=');
    if (eq == std::string::npos) return std::nullopt;
    const std::string name = s.substr(0, eq);
    const std::string args = s.substr(eq + 1);
    try {
        const auto comma = args.find(',');
        if (name == "alpha" && comma == std::string::npos)
            return PreconditionerSpec::resolvent_alpha(std::stod(args));
        if (name == "beta" && comma == std::string::npos)
            return PreconditionerSpec::resolvent_beta(std::stod(args));
        if (name == "combined" && comma != std::string::npos)
            return PreconditionerSpec::combined(std::stod(args.substr(0, comma)),
                                                std::stod(args.substr(comma + 1)));
        if (name == "shifted") {
            if (comma == std::string::npos)
                return PreconditionerSpec::shifted_inverse(std::stod(args));
            return PreconditionerSpec::shifted_inverse_minus(std::stod(args.substr(0, comma)),
                                                             std::stod(args.substr(comma + 1)));
        }
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return std::nullopt;
}

struct GenOptions {
    std::string problem;
    std::string out;
    double eps = 1e-2;
    double a = 100.0;
    double reaction = 0.0;
    index_t n = 64;
    std::string scheme = "backward";
    std::string solution = "manufactured";
    std::string variant = "lower";
    std::uint64_t seed = 1;
    bool no_scaling = false;
};

int cmd_gen(const GenOptions& opt) {
    SparseMatrix a;
    DenseVector b;
    std::optional<DenseVector> x_exact;
    const bool scale = !opt.no_scaling;

    const auto pick_1d_solution = [&]() -> SolutionChoice {
        if (opt.solution == "xsinpix") return SolutionChoice::x_sin_pi_x();
        if (opt.solution == "x1mxcosx") return SolutionChoice::x_one_minus_x_over_cos_x();
        if (opt.solution == "random") return SolutionChoice::random(opt.seed);
        throw InvalidParameterError("--solution must be xsinpix|x1mxcosx|random for ode1d");
    };
    const auto pick_2d_solution = [&]() -> SolutionChoice {
        if (opt.solution == "manufactured") return SolutionChoice::sin_sin_exp();
        if (opt.solution == "random") return SolutionChoice::random(opt.seed);
        throw InvalidParameterError("--solution must be manufactured|random for 2D problems");
    };

    if (opt.problem == "ode1d") {
        const auto sys = gen_ode1d(opt.eps, opt.n, pick_1d_solution(), scale);
        a = sys.a;
        b = sys.b;
        x_exact = sys.x_exact;
    } else if (opt.problem == "pde-conv") {
        const Scheme scheme = opt.scheme == "centered" ? Scheme::Centered : Scheme::Backward;
        const auto sys = gen_pde_convection(opt.a, opt.n, scheme, pick_2d_solution(), scale);
        a = sys.a;
        b = sys.b;
        x_exact = sys.x_exact;
    } else if (opt.problem == "pde-varcoef" || opt.problem == "pde-indef") {
        const double reaction = opt.problem == "pde-indef" && opt.reaction == 0.0
                                    ? -200.0
                                    : opt.reaction;
        const auto sys = gen_pde_varcoef(opt.n, reaction, pick_2d_solution(), scale);
        a = sys.a;
        b = sys.b;
        x_exact = sys.x_exact;
    } else if (opt.problem == "example22") {
        a = opt.variant == "upper" ? example22_upper(opt.eps) : example22_lower(opt.eps);
        const DenseVector ones{1.0, 1.0};
        b = a.apply(ones);
        x_exact = ones;
    } else if (opt.problem == "symplectic") {
        a = symplectic_family(opt.n, opt.eps, opt.seed);
        DenseVector ones(static_cast<std::size_t>(opt.n), 1.0);
        b = a.apply(ones);
        x_exact = ones;
    } else {
        throw InvalidParameterError("unknown --problem " + opt.problem);
    }

    write_matrix_market(a, opt.out + ".mtx");
    write_vector(b, opt.out + ".rhs");
    if (x_exact) write_vector(*x_exact, opt.out + ".sol");
    std::printf("%s: %d x %d, nnz=%zu -> %s.mtx, %s.rhs%s\n", opt.problem.c_str(), a.n_rows(),
                a.n_cols(), a.nnz(), opt.out.c_str(), opt.out.c_str(),
                x_exact ? (", " + opt.out + ".sol").c_str() : "");
    return kExitOk;
}

struct SolveOptions {
    std::string matrix_path;
    std::string rhs_path;
    std::string method;
    std::string pc;
    double tol = 1e-6;
    index_t maxit = 1000;
    double inner_tol = 1e-7;
    std::string variant = "first";
    std::string residual_reference = "original";
    std::string csv_path;
    std::string solution_out;
};

void append_csv_row(const std::string& path, const SolveOptions& opt, const SolveReport& rep,
                    double wall_ms) {
    const bool fresh = !std::ifstream(path).good();
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot open for appending: " + path);
    if (fresh)
        out << "problem,method,preconditioner,parameters,iterations,final_relative_residual,"
               "original_system_residual,wall_time_ms,status\n";
    char buf[64];
    out << bench::csv_escape(opt.matrix_path) << ',' << opt.method << ','
        << bench::csv_escape(opt.pc) << ",tol=" << opt.tol << ',' << format_iter(rep.iterations)
        << ',';
    std::snprintf(buf, sizeof(buf), "%.6e",
                  rep.residual_history.empty() ? 0.0 : rep.residual_history.back());
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.6e", rep.original_relative_residual);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.3f", wall_ms);
    out << buf << ',' << to_string(rep.status) << "\n";
}

int cmd_solve(const SolveOptions& opt) {
    const SparseMatrix a = read_matrix_market(opt.matrix_path);
    const DenseVector b = read_vector(opt.rhs_path);
    if (b.size() != static_cast<std::size_t>(a.n_rows()))
        throw DimensionMismatchError("rhs length does not match the matrix");

    SolveConfig cfg;
    cfg.tol = opt.tol;
    cfg.max_iterations = opt.maxit;
    cfg.residual_reference = opt.residual_reference == "original"
                                 ? ResidualReference::OriginalSystem
                                 : ResidualReference::TransformedSystem;

    std::optional<PreconditionerSpec> spec;
    if (!opt.pc.empty()) {
        spec = parse_pc(opt.pc);
        if (!spec) throw InvalidParameterError("bad --pc value: " + opt.pc);
    }

    const DenseVector x0(b.size(), 0.0);
    const auto start = std::chrono::steady_clock::now();
    SolveReport rep;
    const std::string& m = opt.method;
    if (m == "esd-cgn") {
        rep = esd_cgn(a, b, x0, cfg);
    } else if (m == "isd-cgn") {
        rep = isd_cgn(a, b, x0, opt.inner_tol, cfg);
    } else if (m == "sd-minresn") {
        rep = sd_minresn(a, b, spec.value_or(PreconditionerSpec::self_dual()), cfg);
    } else if (m == "cg" || m == "minres") {
        if (spec) {
            const SelfdualSystem sys = build_selfdual_system(a, b, *spec);
            StopCriterion stop;
            const StopCriterion* stop_ptr = nullptr;
            if (cfg.residual_reference == ResidualReference::OriginalSystem) {
                stop.reference = norm2(b);
                stop.residual = [&a, &b](const DenseVector& x) {
                    DenseVector r = b;
                    const DenseVector ax = a.apply(x);
                    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ax[i];
                    return norm2(r);
                };
                stop_ptr = &stop;
            }
            rep = m == "cg" ? cg(sys.op, sys.rhs, x0, cfg, nullptr, stop_ptr)
                            : minres(sys.op, sys.rhs, x0, cfg, stop_ptr);
            rep.inner_solve_count = sys.counters->inner_solves.load();
            DenseVector r = b;
            const DenseVector ax = a.apply(rep.solution);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ax[i];
            rep.original_relative_residual = norm2(r) / std::max(norm2(b), 1e-300);
        } else {
            LinearOperator op = LinearOperator::from_matrix(a, probe_symmetric(
                                                                   LinearOperator::from_matrix(a)));
            rep = m == "cg" ? cg(op, b, x0, cfg) : minres(op, b, x0, cfg);
            rep.original_relative_residual =
                rep.residual_history.empty() ? 0.0
                                             : rep.residual_history.back() /
                                                   std::max(norm2(b), 1e-300);
        }
    } else if (m == "stationary") {
        const StationaryVariant variant = opt.variant == "squared" ? StationaryVariant::Squared
                                                                   : StationaryVariant::FirstOrder;
        rep = stationary_iteration(split(a), b, variant, cfg);
    } else {
        BaselineMethod bm;
        if (m == "cgne") bm = BaselineMethod::Cgne;
        else if (m == "cgnr") bm = BaselineMethod::Cgnr;
        else if (m == "bicg") bm = BaselineMethod::BiCg;
        else if (m == "cgs") bm = BaselineMethod::Cgs;
        else if (m == "bicgstab") bm = BaselineMethod::BiCgStab;
        else if (m == "qmr") bm = BaselineMethod::Qmr;
        else throw InvalidParameterError("unknown --method " + m);
        if (spec) {
            if (spec->kind != PreconditionerSpec::Kind::SelfDual)
                throw InvalidParameterError(
                    "baseline methods support only --pc selfdual (the symmetric part)");
            const SpdFactorization f(split(a).s);
            rep = baseline_solve(bm, a, b, f, cfg);
        } else {
            rep = baseline_solve(bm, a, b, nullptr, cfg);
        }
    }
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();

    std::printf("%s pc=%s iterations=%s final_rel_residual=%.6e original_residual=%.6e "
                "matvecs=%zu inner_solves=%zu wall_ms=%.3f status=%s\n",
                m.c_str(), opt.pc.empty() ? "-" : opt.pc.c_str(),
                format_iter(rep.iterations).c_str(),
                rep.residual_history.empty() ? 0.0 : rep.residual_history.back(),
                rep.original_relative_residual, rep.matvec_count, rep.inner_solve_count, wall_ms,
                to_string(rep.status));
    if (!opt.csv_path.empty()) append_csv_row(opt.csv_path, opt, rep, wall_ms);
    if (!opt.solution_out.empty()) write_vector(rep.solution, opt.solution_out);
    return status_exit_code(rep.status);
}

int cmd_cond(const std::string& matrix_path, const std::string& csv_path) {
    const SparseMatrix a = read_matrix_market(matrix_path);
    const double kappa_a = condition_number(a);
    const SymmetricSplit sp = split(a);
    const SpectrumEstimate es = extreme_eigs(sp.s, 1e-10);
    std::printf("kappa(A)        = %.10g\n", kappa_a);
    std::printf("lambda(A_s)     = [%.10g, %.10g]\n", es.lambda_min, es.lambda_max);
    // kappa of the self-dual operator is well defined for any nonsingular
    // symmetric part (dense path)
    const SymmetricEigen et = symmetric_eigen(dense_selfdual_matrix(sp));
    double abs_min = INFINITY, abs_max = 0.0;
    for (double v : et.values) {
        abs_min = std::min(abs_min, std::abs(v));
        abs_max = std::max(abs_max, std::abs(v));
    }
    std::printf("kappa(Atilde)   = %.10g\n", abs_max / abs_min);
    const bool spd = es.lambda_min > 0.0;
    if (!spd) {
        std::printf("A_s is not positive definite; kappa(A_s) and the kappa_1/kappa_2 bounds "
                    "are undefined\n");
        return kExitNotPositiveDefinite;
    }
    const ConditionReport rep = kappa_bounds(sp);
    std::printf("kappa(A_s)      = %.10g\n", es.lambda_max / es.lambda_min);
    std::printf("kappa_1 bound   = %.10g\n", rep.kappa1_bound);
    std::printf("kappa_2 bound   = %.10g\n", std::isinf(rep.kappa2_bound) ? INFINITY
                                                                          : rep.kappa2_bound);
    std::printf("lambda_min(Atilde) = %.10g\n", rep.lambda_min_tilde);
    if (!csv_path.empty()) {
        const bool fresh = !std::ifstream(csv_path).good();
        std::ofstream out(csv_path, std::ios::app | std::ios::binary);
        if (!out) throw IoError("cannot open for appending: " + csv_path);
        if (fresh) out << "matrix,kappa_a,kappa_as,kappa_atilde,kappa1,kappa2,lmin_s,lmax_s\n";
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      matrix_path.c_str(), kappa_a, es.lambda_max / es.lambda_min,
                      abs_max / abs_min, rep.kappa1_bound, rep.kappa2_bound, es.lambda_min,
                      es.lambda_max);
        out << buf;
    }
    return kExitOk;
}

int cmd_table(const std::string& id_str, const std::string& out_prefix, double tol, index_t maxit,
              std::uint64_t seed, bool have_tol, bool have_maxit, bool have_seed) {
    const auto id = bench::parse_table_id(id_str);
    if (!id) throw InvalidParameterError("--id must be one of T2..T9");
    bench::PlanOverrides overrides;
    if (have_tol) overrides.tol = tol;
    if (have_maxit) overrides.max_iterations = maxit;
    if (have_seed) overrides.seed = seed;
    const auto plan = bench::build_plan(*id, overrides);
    const unsigned threads = bench::bench_threads();
    const auto rows = bench::run_plan(plan, threads);
    bench::write_csv(rows, out_prefix + ".csv");
    bench::write_markdown(plan, rows, out_prefix + ".md");
    bench::write_meta(plan, rows, threads, out_prefix + ".meta.json");
    int within = 0, tracked = 0, failed = 0;
    for (const auto& row : rows) {
        if (!row.within_tolerance.empty()) {
            ++tracked;
            if (row.within_tolerance == "yes") ++within;
        }
        if (row.status.rfind("Error", 0) == 0) ++failed;
    }
    std::printf("%s: %zu cases, %d/%d within tolerance of the published values%s -> %s.csv\n",
                bench::to_string(*id), rows.size(), within, tracked,
                failed ? (" (" + std::to_string(failed) + " errored)").c_str() : "",
                out_prefix.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sdkrylov: self-dual symmetrization solvers and benchmarks"};
    app.require_subcommand(1);

    GenOptions gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a benchmark system");
    gen_cmd->add_option("--problem", gen.problem,
                        "ode1d|pde-conv|pde-varcoef|pde-indef|example22|symplectic")
        ->required();
    gen_cmd->add_option("--out", gen.out, "output file prefix")->required();
    gen_cmd->add_option("--eps", gen.eps, "diffusion / example parameter");
    gen_cmd->add_option("--a", gen.a, "convection coefficient (pde-conv)");
    gen_cmd->add_option("--reaction", gen.reaction, "reaction coefficient (pde-varcoef)");
    gen_cmd->add_option("--n", gen.n, "number of unknowns");
    gen_cmd->add_option("--scheme", gen.scheme, "backward|centered");
    gen_cmd->add_option("--solution", gen.solution, "xsinpix|x1mxcosx|manufactured|random");
    gen_cmd->add_option("--seed", gen.seed, "seed for random solutions");
    gen_cmd->add_option("--variant", gen.variant, "lower|upper (example22)");
    gen_cmd->add_flag("--no-h2-scaling", gen.no_scaling, "assemble without the h^2 row scaling");

    SolveOptions solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve a system from files");
    solve_cmd->add_option("--matrix", solve.matrix_path, "MatrixMarket file")->required();
    solve_cmd->add_option("--rhs", solve.rhs_path, "right-hand side file")->required();
    solve_cmd
        ->add_option("--method", solve.method,
                     "esd-cgn|isd-cgn|sd-minresn|cg|minres|cgne|cgnr|bicg|cgs|bicgstab|qmr|"
                     "stationary")
        ->required();
    solve_cmd->add_option("--pc", solve.pc,
                          "selfdual|normal|alpha=<v>|beta=<v>|combined=<a>,<b>|shifted=<a>[,<b>]");
    solve_cmd->add_option("--tol", solve.tol, "relative residual target");
    solve_cmd->add_option("--maxit", solve.maxit, "iteration limit");
    solve_cmd->add_option("--inner-tol", solve.inner_tol, "inner tolerance (isd-cgn)");
    solve_cmd->add_option("--variant", solve.variant, "first|squared (stationary)");
    solve_cmd->add_option("--residual-reference", solve.residual_reference,
                          "original|transformed (stopping rule; benchmark default original)");
    solve_cmd->add_option("--csv", solve.csv_path, "append the report row to this CSV");
    solve_cmd->add_option("--solution-out", solve.solution_out, "write the solution vector here");

    std::string cond_matrix, cond_csv;
    CLI::App* cond_cmd = app.add_subcommand("cond", "condition report for a matrix");
    cond_cmd->add_option("--matrix", cond_matrix, "MatrixMarket file")->required();
    cond_cmd->add_option("--csv", cond_csv, "append the report to this CSV");

    std::string table_id, table_out = "table";
    double table_tol = 1e-6;
    index_t table_maxit = 0;
    std::uint64_t table_seed = 0;
    CLI::App* table_cmd = app.add_subcommand("table", "reproduce a published table");
    table_cmd->add_option("--id", table_id, "T2|T3|T4|T5|T6|T7|T8|T9")->required();
    table_cmd->add_option("--out", table_out, "output prefix (.csv/.md/.meta.json)");
    CLI::Option* tol_opt = table_cmd->add_option("--tol", table_tol, "relative residual target");
    CLI::Option* maxit_opt = table_cmd->add_option("--maxit", table_maxit, "iteration cap");
    CLI::Option* seed_opt = table_cmd->add_option("--seed", table_seed, "seed for random rows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadFlags;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (solve_cmd->parsed()) return cmd_solve(solve);
        if (cond_cmd->parsed()) return cmd_cond(cond_matrix, cond_csv);
        if (table_cmd->parsed())
            return cmd_table(table_id, table_out, table_tol, table_maxit, table_seed,
                             tol_opt->count() > 0, maxit_opt->count() > 0, seed_opt->count() > 0);
    } catch (const NotPositiveDefiniteError& e) {
        std::fprintf(stderr,
                     "error: %s\nhint: the symmetric part (or shifted inner matrix) is not "
                     "positive definite; reduce alpha toward 0, or use sd-minresn / a shifted "
                     "preconditioner\n",
                     e.what());
        return kExitNotPositiveDefinite;
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kExitIo;
    } catch (const InvalidParameterError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadFlags;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadFlags;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
