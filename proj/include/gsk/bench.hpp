#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gsk/ilut.hpp"
#include "gsk/krylov.hpp"
#include "gsk/problems.hpp"

namespace gsk {

enum class SolverKind { Gmres, Bicgstab };
enum class ScalingMode { None, Gs1, Gs2, TwoSided };

std::string to_string(SolverKind s);
std::string to_string(ScalingMode s);
SolverKind solver_from_string(const std::string& s);
/// Accepts none, gs1, gs2, sym (also gs_p1, gs_p2, two_sided).
ScalingMode scaling_from_string(const std::string& s);

struct Method {
    SolverKind solver = SolverKind::Bicgstab;
    bool ilut = false;
    ScalingMode scaling = ScalingMode::None;
    IlutConfig ilut_config{};

    /// e.g. "Bi-CGSTAB+ILUT" (scaling not included)
    std::string base_label() const;
};

/// Scales the system as requested, factors ILUT on the scaled matrix, solves and
/// maps the solution back to the original unknowns. final_relres is always in
/// the GS(2) frame of `system`.
SolveResult solve_with(const LinearSystem& system, const Method& method, SolveConfig cfg);

struct BenchCase {
    ProblemSpec problem;
    Method method;
    std::vector<double> tols{1e-4, 1e-7, 1e-10};
    std::size_t max_iters = 10000;
    std::size_t restart = 10;
    /// Optional region table replacing the built-in one.
    std::optional<std::filesystem::path> table;
};

struct BenchPlan {
    std::vector<BenchCase> cases;
    /// Zero the seconds column and omit the timestamp comment.
    bool deterministic = false;
    /// Worker threads; 0 means hardware concurrency.
    std::size_t threads = 0;
};

/// Parses a plan. Problems in the JSON are validated per case and every
/// failure is reported in one exception, prefixed by the case index.
BenchPlan bench_plan_from_json(const std::string& text);
BenchPlan read_bench_plan(const std::filesystem::path& path);
/// One message per failing case, "case i: ...".
std::vector<std::string> validate_plan(const BenchPlan& plan);

struct BenchRow {
    std::size_t case_index = 0;
    std::string problem;
    std::string variant;
    std::string solver;
    std::string precond;
    std::string scaling;
    double tol = 0.0;
    /// converged, max_iters, breakdown, stagnation or error
    std::string status;
    std::size_t iterations = 0;
    /// True relres of the best iterate; also the "converged to" value of failed runs.
    double final_relres = 0.0;
    double seconds = 0.0;
    std::string error;

    bool converged() const { return status == "converged"; }
};

std::vector<BenchRow> run_bench(const BenchPlan& plan);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows, bool deterministic);
void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows,
                     bool deterministic);

/// Convergence summary, one line per method and one column per problem variant.
/// '+' converged, '*' converged in fewer iterations than the unscaled run of the
/// same method, '-' not converged. A cell with any '-' also shows the best relres.
std::string summary_table(const std::vector<BenchRow>& rows);

/// Fixed-width table of iterations (or status) by method and tolerance.
std::string iteration_table(const std::vector<BenchRow>& rows);

} // namespace gsk
