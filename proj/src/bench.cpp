#include "gsk/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gsk/scaling.hpp"

namespace gsk {

using nlohmann::json;

std::string to_string(SolverKind s)
{
    return s == SolverKind::Gmres ? "gmres" : "bicgstab";
}

std::string to_string(ScalingMode s)
{
    switch (s) {
    case ScalingMode::None: return "none";
    case ScalingMode::Gs1: return "gs1";
    case ScalingMode::Gs2: return "gs2";
    case ScalingMode::TwoSided: return "sym";
    }
    return "none";
}

SolverKind solver_from_string(const std::string& s)
{
    if (s == "gmres") return SolverKind::Gmres;
    if (s == "bicgstab") return SolverKind::Bicgstab;
    throw Error("unknown solver '" + s + "' (expected gmres or bicgstab)");
}

ScalingMode scaling_from_string(const std::string& s)
{
    if (s == "none") return ScalingMode::None;
    if (s == "gs1" || s == "gs_p1") return ScalingMode::Gs1;
    if (s == "gs2" || s == "gs_p2") return ScalingMode::Gs2;
    if (s == "sym" || s == "two_sided") return ScalingMode::TwoSided;
    throw Error("unknown scaling '" + s + "' (expected none, gs1, gs2 or sym)");
}

std::string Method::base_label() const
{
    std::string s = solver == SolverKind::Gmres ? "GMRES" : "Bi-CGSTAB";
    if (ilut) s += "+ILUT";
    return s;
}

SolveResult solve_with(const LinearSystem& system, const Method& method, SolveConfig cfg)
{
    const auto run = [&](const LinearSystem& sys, const SolveConfig& c) {
        std::optional<IluFactors> factors;
        if (method.ilut) factors = ilut_factor(sys.matrix, method.ilut_config);
        const IluFactors* pre = factors ? &*factors : nullptr;
        return method.solver == SolverKind::Gmres ? gmres(sys, pre, c) : bicgstab(sys, pre, c);
    };

    switch (method.scaling) {
    case ScalingMode::None: return run(system, cfg);
    case ScalingMode::Gs1:
    case ScalingMode::Gs2: {
        const auto scaled = gs_scale(system, method.scaling == ScalingMode::Gs1 ? 1 : 2);
        // The GS(2) frame is invariant under row scaling, so no explicit frame is needed.
        return run(scaled.system, cfg);
    }
    case ScalingMode::TwoSided: {
        const auto scaled = gs_scale_symmetric(system, 2);
        const auto& d = scaled.scaling.diag;
        if (cfg.residual_frame && !cfg.frame) {
            DiagScaling frame = gs_diagonal(system.matrix, 2);
            for (std::size_t i = 0; i < d.size(); ++i) frame.diag[i] /= std::sqrt(d[i]);
            cfg.frame = std::move(frame);
        }
        if (!cfg.x0.empty()) {
            check_same_length(cfg.x0.size(), d.size(), "initial guess");
            for (std::size_t i = 0; i < d.size(); ++i) cfg.x0[i] /= std::sqrt(d[i]);
        }
        auto result = run(scaled.system, cfg);
        result.x = unscale_solution(result.x, scaled.scaling);
        return result;
    }
    }
    throw Error("unknown scaling mode");
}

// ---------------------------------------------------------------------------
// Plans

namespace {

GridSpec grid_from_json(const json& j, ProblemId id)
{
    const int dim = id == ProblemId::P4 ? 3 : 2;
    if (j.is_number_integer()) {
        const auto n = j.get<std::size_t>();
        return dim == 3 ? GridSpec::cube(n) : GridSpec::square(n);
    }
    const auto v = j.get<std::vector<std::size_t>>();
    if (v.size() == 2) return GridSpec{2, v[0], v[1], 1};
    if (v.size() == 3) return GridSpec{3, v[0], v[1], v[2]};
    throw Error("grid must be a number or a list of 2 or 3 numbers");
}

BenchCase case_from_json(const json& j)
{
    BenchCase c;
    const json& p = j.at("problem");
    const auto id = problem_from_string(p.at("id").get<std::string>());
    c.problem = ProblemSpec::defaults(id, grid_from_json(p.at("grid"), id));
    c.problem.inside = p.value("inside", c.problem.inside);
    c.problem.convection = p.value("convection", c.problem.convection);
    c.problem.continuous = p.value("continuous", false);
    if (p.contains("config")) c.table = p.at("config").get<std::string>();

    c.method.solver = solver_from_string(j.at("solver").get<std::string>());
    const auto pre = j.value("precond", std::string("none"));
    if (pre != "none" && pre != "ilut") throw Error("precond must be none or ilut");
    c.method.ilut = pre == "ilut";
    c.method.scaling = scaling_from_string(j.value("scaling", std::string("none")));
    if (j.contains("ilut")) {
        c.method.ilut_config.drop_tol = j["ilut"].value("drop_tol", 0.0);
        c.method.ilut_config.fill = j["ilut"].value("fill", 1.0);
    }
    if (j.contains("tols")) c.tols = j.at("tols").get<std::vector<double>>();
    c.max_iters = j.value("max_iters", c.max_iters);
    c.restart = j.value("restart", c.restart);
    return c;
}

std::string case_problem(const BenchCase& c, std::size_t i)
{
    std::string msg;
    try {
        c.problem.validate();
    } catch (const Error& e) {
        msg = e.what();
    }
    if (!msg.empty()) return "case " + std::to_string(i) + ": " + msg;
    if (c.tols.empty()) return "case " + std::to_string(i) + ": tols is empty";
    for (std::size_t k = 0; k < c.tols.size(); ++k) {
        if (!(c.tols[k] > 0.0)) return "case " + std::to_string(i) + ": tol must be > 0";
        if (k > 0 && !(c.tols[k] < c.tols[k - 1])) {
            return "case " + std::to_string(i) + ": tols must be strictly descending";
        }
    }
    if (c.max_iters < 1) return "case " + std::to_string(i) + ": max_iters must be >= 1";
    if (c.restart < 1) return "case " + std::to_string(i) + ": restart must be >= 1";
    if (c.method.ilut_config.drop_tol < 0.0 || c.method.ilut_config.fill < 0.0) {
        return "case " + std::to_string(i) + ": ilut drop_tol and fill must be >= 0";
    }
    return {};
}

} // namespace

std::vector<std::string> validate_plan(const BenchPlan& plan)
{
    std::vector<std::string> errors;
    for (std::size_t i = 0; i < plan.cases.size(); ++i) {
        auto msg = case_problem(plan.cases[i], i);
        if (!msg.empty()) errors.push_back(std::move(msg));
    }
    return errors;
}

BenchPlan bench_plan_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("bench plan: ") + e.what());
    }
    BenchPlan plan;
    std::vector<std::string> errors;
    try {
        plan.deterministic = j.value("deterministic", false);
        plan.threads = j.value("threads", std::size_t{0});
    } catch (const json::exception& e) {
        throw Error(std::string("bench plan: ") + e.what());
    }
    if (j.contains("cases")) {
        const auto& cases = j.at("cases");
        for (std::size_t i = 0; i < cases.size(); ++i) {
            try {
                plan.cases.push_back(case_from_json(cases[i]));
            } catch (const std::exception& e) {
                errors.push_back("case " + std::to_string(i) + ": " + e.what());
                plan.cases.emplace_back();
            }
        }
    }
    for (auto& e : validate_plan(plan)) {
        if (std::find_if(errors.begin(), errors.end(), [&](const std::string& s) {
                return s.substr(0, s.find(':')) == e.substr(0, e.find(':'));
            }) == errors.end()) {
            errors.push_back(std::move(e));
        }
    }
    if (!errors.empty()) {
        std::sort(errors.begin(), errors.end(), [](const std::string& a, const std::string& b) {
            return std::stoul(a.substr(5)) < std::stoul(b.substr(5));
        });
        std::string msg = "bench plan has " + std::to_string(errors.size()) + " invalid case(s):";
        for (const auto& e : errors) msg += "\n  " + e;
        throw Error(msg);
    }
    return plan;
}

BenchPlan read_bench_plan(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return bench_plan_from_json(ss.str());
}

// ---------------------------------------------------------------------------
// Runner

std::vector<BenchRow> run_bench(const BenchPlan& plan)
{
    if (auto errors = validate_plan(plan); !errors.empty()) {
        std::string msg = "bench plan has invalid cases:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw Error(msg);
    }

    struct Task {
        std::size_t case_index;
        double tol;
    };
    std::vector<Task> tasks;
    std::vector<std::size_t> first_row(plan.cases.size());
    for (std::size_t i = 0; i < plan.cases.size(); ++i) {
        first_row[i] = tasks.size();
        for (double t : plan.cases[i].tols) tasks.push_back({i, t});
    }

    // One system per distinct problem, generated up front and shared read-only.
    std::map<std::string, std::size_t> key_to_system;
    std::vector<LinearSystem> systems;
    std::vector<std::string> system_errors;
    std::vector<std::size_t> case_system(plan.cases.size());
    for (std::size_t i = 0; i < plan.cases.size(); ++i) {
        const auto& c = plan.cases[i];
        const std::string key = to_string(c.problem.id) + "|" + c.problem.variant() + "|" +
                                (c.table ? c.table->string() : std::string());
        auto [it, inserted] = key_to_system.try_emplace(key, systems.size());
        if (inserted) {
            systems.emplace_back();
            system_errors.emplace_back();
            try {
                if (c.table) {
                    const auto table = read_region_table(*c.table);
                    systems.back() = generate(c.problem, &table);
                } else {
                    systems.back() = generate(c.problem);
                }
            } catch (const std::exception& e) {
                system_errors.back() = e.what();
            }
        }
        case_system[i] = it->second;
    }

    std::vector<BenchRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t k = next++; k < tasks.size(); k = next++) {
            const auto& c = plan.cases[tasks[k].case_index];
            BenchRow& row = rows[k];
            row.case_index = tasks[k].case_index;
            row.problem = to_string(c.problem.id);
            row.variant = c.problem.variant();
            row.solver = to_string(c.method.solver);
            row.precond = c.method.ilut ? "ilut" : "none";
            row.scaling = to_string(c.method.scaling);
            row.tol = tasks[k].tol;
            SolveConfig cfg;
            cfg.tol = tasks[k].tol;
            cfg.max_iters = c.max_iters;
            cfg.restart = c.restart;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const std::size_t sys = case_system[tasks[k].case_index];
                if (!system_errors[sys].empty()) throw Error(system_errors[sys]);
                const auto res = solve_with(systems[sys], c.method, cfg);
                row.status = to_string(res.report.status);
                row.iterations = res.report.iterations;
                row.final_relres = res.report.final_relres;
            } catch (const std::exception& e) {
                row.status = "error";
                row.final_relres = std::numeric_limits<double>::quiet_NaN();
                row.error = e.what();
            }
            row.seconds = plan.deterministic
                              ? 0.0
                              : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };

    std::size_t threads = plan.threads ? plan.threads : std::thread::hardware_concurrency();
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(tasks.size(), 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows, bool deterministic)
{
    if (!deterministic) {
        const std::time_t now = std::time(nullptr);
        char stamp[64];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "# generated " << stamp << '\n';
    }
    out << "problem,variant,solver,precond,scaling,tol,status,iterations,final_relres,seconds\n";
    for (const auto& r : rows) {
        out << r.problem << ',' << csv_field(r.variant) << ',' << r.solver << ',' << r.precond << ','
            << r.scaling << ',' << fmt("%g", r.tol) << ',' << r.status << ',' << r.iterations << ','
            << fmt("%.6e", r.final_relres) << ',' << fmt("%.3f", r.seconds) << '\n';
    }
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows,
                     bool deterministic)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_bench_csv(out, rows, deterministic);
    if (!out) throw Error("write failed for " + path.string());
}

namespace {

std::string method_label(const BenchRow& r)
{
    std::string s = r.solver == "gmres" ? "GMRES" : "Bi-CGSTAB";
    if (r.precond == "ilut") s += "+ILUT";
    if (r.scaling == "gs1") s += " with GS(1)";
    if (r.scaling == "gs2") s += " with GS";
    if (r.scaling == "sym") s += " with two-sided GS";
    return s;
}

std::string column_label(const BenchRow& r)
{
    return r.problem + " " + r.variant;
}

std::string pad(const std::string& s, std::size_t w)
{
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& body)
{
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : body) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    const auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            out << (c ? " | " : "") << pad(cells[c], width[c]);
        }
        out << '\n';
    };
    line(header);
    std::vector<std::string> rule;
    for (auto w : width) rule.emplace_back(w, '-');
    line(rule);
    for (const auto& row : body) line(row);
    return out.str();
}

template <class T>
void push_unique(std::vector<T>& v, const T& x)
{
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

} // namespace

std::string summary_table(const std::vector<BenchRow>& rows)
{
    std::vector<std::string> methods, columns;
    for (const auto& r : rows) {
        push_unique(methods, method_label(r));
        push_unique(columns, column_label(r));
    }

    const auto unscaled_iters = [&](const BenchRow& r) -> std::optional<std::size_t> {
        for (const auto& o : rows) {
            if (o.scaling == "none" && o.solver == r.solver && o.precond == r.precond &&
                o.problem == r.problem && o.variant == r.variant && o.tol == r.tol) {
                if (o.converged()) return o.iterations;
                return std::nullopt;
            }
        }
        return std::nullopt;
    };

    std::vector<std::vector<std::string>> body;
    for (const auto& m : methods) {
        std::vector<std::string> line{m};
        for (const auto& col : columns) {
            std::vector<const BenchRow*> cell;
            for (const auto& r : rows) {
                if (method_label(r) == m && column_label(r) == col) cell.push_back(&r);
            }
            std::sort(cell.begin(), cell.end(), [](auto* a, auto* b) { return a->tol > b->tol; });
            std::string marks;
            bool failed = false;
            double best = std::numeric_limits<double>::infinity();
            for (const auto* r : cell) {
                if (!marks.empty()) marks += ' ';
                if (r->converged()) {
                    const auto base = r->scaling == "none" ? std::nullopt : unscaled_iters(*r);
                    const bool better = r->scaling != "none" && (!base || r->iterations < *base);
                    marks += better ? '*' : '+';
                } else {
                    marks += '-';
                    failed = true;
                }
                if (std::isfinite(r->final_relres)) best = std::min(best, r->final_relres);
            }
            if (failed && std::isfinite(best)) marks += " (best " + fmt("%.2g", best) + ")";
            line.push_back(marks);
        }
        body.push_back(std::move(line));
    }
    std::vector<std::string> header{"Method"};
    header.insert(header.end(), columns.begin(), columns.end());
    return render(header, body) +
           "'-' no convergence, '+' convergence, '*' convergence in fewer iterations than without GS.\n";
}

std::string iteration_table(const std::vector<BenchRow>& rows)
{
    std::vector<std::string> methods;
    std::vector<double> tols;
    for (const auto& r : rows) {
        push_unique(methods, column_label(r) + " " + method_label(r));
        push_unique(tols, r.tol);
    }
    std::sort(tols.begin(), tols.end(), std::greater<>());
    std::vector<std::vector<std::string>> body;
    for (const auto& m : methods) {
        std::vector<std::string> line{m};
        for (double t : tols) {
            std::string cell;
            for (const auto& r : rows) {
                if (column_label(r) + " " + method_label(r) != m || r.tol != t) continue;
                cell = r.converged() ? std::to_string(r.iterations)
                                     : "no conv. (" + fmt("%.2g", r.final_relres) + ")";
            }
            line.push_back(cell);
        }
        body.push_back(std::move(line));
    }
    std::vector<std::string> header{"Method"};
    for (double t : tols) header.push_back("tol " + fmt("%g", t));
    return render(header, body);
}

} // namespace gsk
