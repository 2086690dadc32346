#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsk/bench.hpp"
#include "gsk/matrix_market.hpp"
#include "gsk/problems.hpp"
#include "gsk/scaling.hpp"
#include "gsk/spectra.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

gsk::GridSpec parse_grid(const std::string& text, gsk::ProblemId id)
{
    std::vector<std::size_t> n;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t pos = 0;
        long v = -1;
        try {
            v = std::stol(part, &pos);
        } catch (const std::exception&) {
        }
        if (pos != part.size() || v < 1) throw gsk::Error("bad --grid '" + text + "'");
        n.push_back(static_cast<std::size_t>(v));
    }
    const int dim = id == gsk::ProblemId::P4 ? 3 : 2;
    if (n.size() == 1) return dim == 3 ? gsk::GridSpec::cube(n[0]) : gsk::GridSpec::square(n[0]);
    if (static_cast<int>(n.size()) != dim) {
        throw gsk::Error(gsk::to_string(id) + " needs --grid N or a " + std::to_string(dim) +
                         "-component grid");
    }
    return dim == 3 ? gsk::GridSpec{3, n[0], n[1], n[2]} : gsk::GridSpec{2, n[0], n[1], 1};
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) throw gsk::Error("cannot write " + path.string());
    out << text;
    if (!out) throw gsk::Error("write failed for " + path.string());
}

gsk::LinearSystem scaled_copy(const gsk::LinearSystem& sys, gsk::ScalingMode mode)
{
    switch (mode) {
    case gsk::ScalingMode::None: return sys;
    case gsk::ScalingMode::Gs1: return gsk::gs_scale(sys, 1).system;
    case gsk::ScalingMode::Gs2: return gsk::gs_scale(sys, 2).system;
    case gsk::ScalingMode::TwoSided: return gsk::gs_scale_symmetric(sys, 2).system;
    }
    return sys;
}

json report_json(const gsk::SolveReport& r, const gsk::Method& m, double tol)
{
    json j;
    j["solver"] = gsk::to_string(m.solver);
    j["precond"] = m.ilut ? "ilut" : "none";
    j["scaling"] = gsk::to_string(m.scaling);
    j["tol"] = tol;
    j["status"] = gsk::to_string(r.status);
    j["iterations"] = r.iterations;
    j["iteration_unit"] = m.solver == gsk::SolverKind::Gmres ? "inner step" : "full iteration";
    j["final_relres"] = r.final_relres;
    j["wall_time"] = r.wall_time;
    j["relres_history"] = r.relres_history;
    return j;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Geometric scaling toolkit: problem generation, Krylov solves, benchmarks, spectra"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a benchmark problem as Matrix Market files");
    std::string problem, grid_text, config_path, gen_out;
    std::optional<double> inside, convection;
    bool continuous = false;
    gen->add_option("--problem", problem, "P1, P2, P3 or P4")->required();
    gen->add_option("--grid", grid_text, "NX[,NY[,NZ]] interior points per axis")->required();
    gen->add_option("--inside", inside, "coefficient inside the discontinuity region");
    gen->add_option("--convection", convection, "convection magnitude (P4)");
    gen->add_flag("--continuous", continuous, "use the inside value everywhere");
    gen->add_option("--config", config_path, "region table JSON replacing the built-in layout");
    gen->add_option("--out", gen_out, "output directory")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "Solve a system and write a JSON report");
    std::string solve_in, solver_name, scale_name = "none", report_path;
    bool use_ilut = false;
    double tol = 0.0;
    std::size_t max_iters = 10000, restart = 10;
    solve->add_option("--in", solve_in, "system directory or matrix .mtx")->required();
    solve->add_option("--solver", solver_name, "gmres or bicgstab")->required();
    solve->add_flag("--ilut", use_ilut, "ILUT right preconditioner (drop 0, fill 1)");
    solve->add_option("--scale", scale_name, "none, gs1, gs2 or sym");
    solve->add_option("--tol", tol, "relative residual target")->required();
    solve->add_option("--max-iters", max_iters, "iteration cap");
    solve->add_option("--restart", restart, "GMRES subspace size");
    solve->add_option("--report", report_path, "report file (default: stdout)");

    // bench
    auto* bench = app.add_subcommand("bench", "Run a benchmark plan");
    std::string plan_path, bench_out, summary_path;
    std::optional<std::size_t> threads;
    bench->add_option("--plan", plan_path, "plan JSON")->required();
    bench->add_option("--out", bench_out, "results CSV")->required();
    bench->add_option("--summary", summary_path, "summary table (text)");
    bench->add_option("--threads", threads, "worker threads");

    // eig
    auto* eig = app.add_subcommand("eig", "Compute the spectrum of a system matrix");
    std::string eig_in, eig_scale = "none", eig_out;
    eig->add_option("--in", eig_in, "system directory or matrix .mtx")->required();
    eig->add_option("--scale", eig_scale, "none, gs1, gs2 or sym");
    eig->add_option("--out", eig_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*gen) {
            gsk::ProblemSpec spec = gsk::ProblemSpec::defaults(gsk::problem_from_string(problem),
                                                               gsk::GridSpec::square(1));
            spec.grid = parse_grid(grid_text, spec.id);
            if (inside) spec.inside = *inside;
            if (convection) spec.convection = *convection;
            spec.continuous = continuous;
            if (spec.id == gsk::ProblemId::P3 && (inside || convection || continuous)) {
                throw gsk::Error("P3 takes no --inside, --convection or --continuous");
            }
            if (spec.id != gsk::ProblemId::P4 && convection) {
                throw gsk::Error("--convection applies to P4 only");
            }
            spec.validate();
            gsk::LinearSystem sys;
            if (!config_path.empty()) {
                const auto table = gsk::read_region_table(config_path);
                sys = gsk::generate(spec, &table);
            } else {
                sys = gsk::generate(spec);
            }
            const fs::path dir(gen_out);
            gsk::write_matrix_market(sys, dir);
            json side;
            side["problem"] = gsk::to_string(spec.id);
            side["grid"] = {spec.grid.nx, spec.grid.ny};
            if (spec.grid.dim == 3) side["grid"].push_back(spec.grid.nz);
            side["inside"] = spec.inside;
            side["convection"] = spec.convection;
            side["continuous"] = spec.continuous;
            side["variant"] = spec.variant();
            side["label"] = sys.label;
            side["n"] = sys.size();
            side["nnz"] = sys.matrix.nnz();
            if (!config_path.empty()) side["config"] = config_path;
            write_text(dir / "problem.json", side.dump(2) + "\n");
            std::cout << sys.label << ": n=" << sys.size() << " nnz=" << sys.matrix.nnz() << " -> "
                      << dir.string() << '\n';
            return kExitOk;
        }

        if (*solve) {
            gsk::Method method;
            method.solver = gsk::solver_from_string(solver_name);
            method.ilut = use_ilut;
            method.scaling = gsk::scaling_from_string(scale_name);
            gsk::SolveConfig cfg;
            cfg.tol = tol;
            cfg.max_iters = max_iters;
            cfg.restart = restart;
            cfg.validate();
            const auto sys = gsk::read_matrix_market(solve_in);
            const auto result = gsk::solve_with(sys, method, cfg);
            json j = report_json(result.report, method, tol);
            j["input"] = solve_in;
            j["n"] = sys.size();
            if (report_path.empty()) {
                std::cout << j.dump(2) << '\n';
            } else {
                write_text(report_path, j.dump(2) + "\n");
                std::cout << gsk::to_string(result.report.status) << " after " << result.report.iterations
                          << " iterations, relres " << result.report.final_relres << '\n';
            }
            return result.report.status == gsk::SolveStatus::Converged ? kExitOk : kExitNotConverged;
        }

        if (*bench) {
            auto plan = gsk::read_bench_plan(plan_path);
            if (threads) plan.threads = *threads;
            const auto rows = gsk::run_bench(plan);
            gsk::write_bench_csv(bench_out, rows, plan.deterministic);
            const std::string summary = rows.empty() ? std::string()
                                                     : gsk::iteration_table(rows) + "\n" + gsk::summary_table(rows);
            if (!summary_path.empty()) write_text(summary_path, summary);
            std::cout << rows.size() << " runs -> " << bench_out << '\n';
            return kExitOk;
        }

        if (*eig) {
            const auto sys = scaled_copy(gsk::read_matrix_market(eig_in), gsk::scaling_from_string(eig_scale));
            const auto report = gsk::eigen_report(sys);
            const fs::path dir(eig_out);
            fs::create_directories(dir);
            gsk::export_spectrum(report, dir / "spectrum.csv", dir / "histogram.csv");
            write_text(dir / "eigen_report.json", gsk::eigen_report_to_json(report) + "\n");
            std::printf("n=%zu lambda_min=%.3e lambda_max=%.3e ratio=%.3e origin_bin_count=%zu\n",
                        report.eigenvalues.size(), report.lambda_min_mod, report.lambda_max_mod,
                        report.cond_ratio, report.origin_bin_count);
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
