#include "gsk/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace gsk {

std::string to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::Breakdown: return "breakdown";
    case SolveStatus::Stagnation: return "stagnation";
    }
    return "unknown";
}

void SolveConfig::validate() const
{
    if (!(tol > 0.0)) throw Error("solve config: tol must be > 0");
    if (max_iters < 1) throw Error("solve config: max_iters must be >= 1");
    if (restart < 1) throw Error("solve config: restart must be >= 1");
    if (!(brkdown_scale > 0.0)) throw Error("solve config: brkdown_scale must be > 0");
}

Vector frame_weights(const LinearSystem& system, const SolveConfig& cfg)
{
    if (cfg.frame) {
        check_same_length(cfg.frame->diag.size(), system.size(), "residual frame");
        return cfg.frame->diag;
    }
    if (!cfg.residual_frame) return ones(system.size());
    return gs_diagonal(system.matrix, 2).diag;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Relative residual in the frame given by w, with the denominator fixed by x0.
class ResidualMeter {
public:
    ResidualMeter(const LinearSystem& sys, Vector w) : sys_(sys), w_(std::move(w)), r_(sys.size()) {}

    double weighted(std::span<const double> r) const { return weighted_norm2(w_, r); }

    double set_reference(std::span<const double> x0)
    {
        residual(sys_.matrix, x0, sys_.rhs, r_);
        ref_ = weighted(r_);
        return ref_;
    }

    double reference() const { return ref_; }

    double relative(std::span<const double> r) const { return weighted(r) / ref_; }

    /// True relative residual of x; leaves b - A x in residual().
    double true_relres(std::span<const double> x)
    {
        residual(sys_.matrix, x, sys_.rhs, r_);
        return weighted(r_) / ref_;
    }

    const Vector& residual_vector() const { return r_; }

private:
    const LinearSystem& sys_;
    Vector w_;
    Vector r_;
    double ref_ = 0.0;
};

Vector initial_guess(const LinearSystem& sys, const SolveConfig& cfg)
{
    if (cfg.x0.empty()) return Vector(sys.size(), 0.0);
    check_same_length(cfg.x0.size(), sys.size(), "initial guess");
    return cfg.x0;
}

void check_inputs(const LinearSystem& sys, const IluFactors* precond, const SolveConfig& cfg)
{
    cfg.validate();
    sys.validate();
    if (precond) check_same_length(precond->size(), sys.size(), "preconditioner");
}

// Max-iteration exits are stagnation when the best relres of the last 20% of
// the history improved on everything before it by less than 1%.
SolveStatus classify_exhausted(const std::vector<double>& history)
{
    const std::size_t n = history.size();
    if (n < 5) return SolveStatus::MaxIters;
    const std::size_t tail = std::max<std::size_t>(1, n / 5);
    const std::size_t split = n - tail;
    const auto finite_min = [](auto b, auto e) {
        double m = std::numeric_limits<double>::infinity();
        for (auto it = b; it != e; ++it) {
            if (std::isfinite(*it)) m = std::min(m, *it);
        }
        return m;
    };
    const double before = finite_min(history.begin(), history.begin() + static_cast<std::ptrdiff_t>(split));
    const double after = finite_min(history.begin() + static_cast<std::ptrdiff_t>(split), history.end());
    return after >= 0.99 * before ? SolveStatus::Stagnation : SolveStatus::MaxIters;
}

void precondition(const IluFactors* m, std::span<const double> in, std::span<double> out)
{
    if (m) {
        apply_precond(*m, in, out);
    } else {
        std::copy(in.begin(), in.end(), out.begin());
    }
}

} // namespace

double true_relres(const LinearSystem& original, std::span<const double> x,
                   std::span<const double> x0, const std::optional<DiagScaling>& frame)
{
    original.validate();
    check_same_length(x.size(), original.size(), "true_relres x");
    check_same_length(x0.size(), original.size(), "true_relres x0");
    Vector w = frame ? frame->diag : gs_diagonal(original.matrix, 2).diag;
    check_same_length(w.size(), original.size(), "true_relres frame");

    Vector r(original.size());
    residual(original.matrix, x0, original.rhs, r);
    const double ref = weighted_norm2(w, r);
    residual(original.matrix, x, original.rhs, r);
    const double num = weighted_norm2(w, r);
    if (ref == 0.0) {
        if (num == 0.0) return 0.0;
        throw Error("true_relres: x0 already solves system");
    }
    return num / ref;
}

SolveResult gmres(const LinearSystem& system, const IluFactors* precond, const SolveConfig& cfg)
{
    const auto t0 = Clock::now();
    check_inputs(system, precond, cfg);
    const std::size_t n = system.size();
    const std::size_t m = std::min(cfg.restart, n);

    SolveResult out;
    SolveReport& rep = out.report;
    rep.solver = "gmres";

    ResidualMeter meter(system, frame_weights(system, cfg));
    Vector x = initial_guess(system, cfg);
    if (meter.set_reference(x) == 0.0) {
        rep.status = SolveStatus::Converged;
        rep.final_relres = 0.0;
        out.x = std::move(x);
        rep.wall_time = seconds_since(t0);
        return out;
    }

    std::vector<Vector> basis(m + 1, Vector(n));
    // Hessenberg matrix, column-major: h[j] holds column j (m + 1 rows).
    std::vector<Vector> h(m, Vector(m + 1));
    Vector cs(m), sn(m), g(m + 1), y(m), u(m + 1);
    Vector z(n), w(n), est(n);

    Vector r = meter.residual_vector();
    Vector best_x = x;
    double best_rel = 1.0;
    bool converged = false;

    while (rep.iterations < cfg.max_iters && !converged) {
        const double beta = norm2(r);
        if (beta == 0.0) break;
        for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        rep.cycle_starts.push_back(rep.iterations);

        std::size_t k = 0;
        bool history_pending = false;
        for (std::size_t j = 0; j < m && rep.iterations < cfg.max_iters; ++j) {
            precondition(precond, basis[j], z);
            spmv(system.matrix, z, w);
            const double w_norm0 = norm2(w);

            auto& hj = h[j];
            std::fill(hj.begin(), hj.end(), 0.0);
            // classical Gram-Schmidt, applied twice
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t i = 0; i <= j; ++i) u[i] = dot(basis[i], w);
                for (std::size_t i = 0; i <= j; ++i) {
                    axpy(-u[i], basis[i], w);
                    hj[i] += u[i];
                }
            }
            const double h_next = norm2(w);
            hj[j + 1] = h_next;

            for (std::size_t i = 0; i < j; ++i) {
                const double a = hj[i];
                const double b = hj[i + 1];
                hj[i] = cs[i] * a + sn[i] * b;
                hj[i + 1] = -sn[i] * a + cs[i] * b;
            }
            const double d = std::hypot(hj[j], hj[j + 1]);
            if (d == 0.0) {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = hj[j] / d;
                sn[j] = hj[j + 1] / d;
            }
            hj[j] = d;
            hj[j + 1] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];

            ++rep.iterations;
            k = j + 1;
            rep.ls_history.push_back(std::fabs(g[j + 1]));

            const bool invariant = h_next <= 1e-14 * w_norm0 || d == 0.0;
            if (invariant) {
                history_pending = true;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) basis[j + 1][i] = w[i] / h_next;

            // Residual b - A x_j = V_{j+1} Q^T (g_{j+1} e_{j+1}), mapped into the frame.
            std::fill(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(j + 2), 0.0);
            u[j + 1] = g[j + 1];
            for (std::size_t i = j + 1; i-- > 0;) {
                const double a = u[i];
                const double b = u[i + 1];
                u[i] = cs[i] * a - sn[i] * b;
                u[i + 1] = sn[i] * a + cs[i] * b;
            }
            std::fill(est.begin(), est.end(), 0.0);
            for (std::size_t i = 0; i <= j + 1; ++i) axpy(u[i], basis[i], est);
            const double rel = meter.relative(est);
            rep.relres_history.push_back(rel);
            if (rel <= cfg.tol) break;
        }

        if (k > 0) {
            for (std::size_t i = k; i-- > 0;) {
                double s = g[i];
                for (std::size_t c = i + 1; c < k; ++c) s -= h[c][i] * y[c];
                y[i] = s / h[i][i];
            }
            std::fill(est.begin(), est.end(), 0.0);
            for (std::size_t i = 0; i < k; ++i) axpy(y[i], basis[i], est);
            precondition(precond, est, z);
            axpy(1.0, z, x);
        }

        const double rel = meter.true_relres(x);
        r = meter.residual_vector();
        if (history_pending) rep.relres_history.push_back(rel);
        if (!std::isfinite(rel)) break;
        if (rel < best_rel) {
            best_rel = rel;
            best_x = x;
        }
        if (rel <= cfg.tol) converged = true;
    }

    rep.final_relres = meter.true_relres(best_x);
    out.x = std::move(best_x);
    if (converged) {
        rep.status = SolveStatus::Converged;
    } else if (rep.iterations < cfg.max_iters) {
        rep.status = SolveStatus::Breakdown;
    } else {
        rep.status = classify_exhausted(rep.relres_history);
    }
    rep.wall_time = seconds_since(t0);
    return out;
}

SolveResult bicgstab(const LinearSystem& system, const IluFactors* precond,
                     const SolveConfig& cfg)
{
    const auto t0 = Clock::now();
    check_inputs(system, precond, cfg);
    const std::size_t n = system.size();
    const double brk = cfg.brkdown_scale * std::numeric_limits<double>::epsilon();

    SolveResult out;
    SolveReport& rep = out.report;
    rep.solver = "bicgstab";

    ResidualMeter meter(system, frame_weights(system, cfg));
    Vector x = initial_guess(system, cfg);
    if (meter.set_reference(x) == 0.0) {
        rep.status = SolveStatus::Converged;
        rep.final_relres = 0.0;
        out.x = std::move(x);
        rep.wall_time = seconds_since(t0);
        return out;
    }

    Vector r = meter.residual_vector();
    Vector r_hat = r;
    Vector p(n, 0.0), v(n, 0.0), p_hat(n), s(n), s_hat(n), t(n);
    double rho_old = 1.0, alpha = 1.0, omega = 1.0;
    bool fresh = true;

    Vector best_x = x;
    double best_est = 1.0;
    bool converged = false;
    bool breakdown = false;

    // After a stopping test passes on the recursive residual, the true residual
    // decides. On disagreement the recursion restarts from the true residual.
    const auto verify = [&]() {
        const double rel = meter.true_relres(x);
        if (rel <= cfg.tol) return true;
        r = meter.residual_vector();
        r_hat = r;
        fresh = true;
        return false;
    };

    while (rep.iterations < cfg.max_iters) {
        const double rho = dot(r_hat, r);
        if (!std::isfinite(rho) || std::fabs(rho) <= brk * norm2(r_hat) * norm2(r)) {
            breakdown = true;
            break;
        }
        if (fresh) {
            p = r;
            fresh = false;
        } else {
            const double beta = (rho / rho_old) * (alpha / omega);
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        precondition(precond, p, p_hat);
        spmv(system.matrix, p_hat, v);
        const double rv = dot(r_hat, v);
        if (!std::isfinite(rv) || std::fabs(rv) <= brk * norm2(r_hat) * norm2(v)) {
            breakdown = true;
            break;
        }
        alpha = rho / rv;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        ++rep.iterations;

        const double est_half = meter.relative(s);
        if (est_half <= cfg.tol) {
            axpy(alpha, p_hat, x);
            rep.relres_history.push_back(est_half);
            if (verify()) {
                converged = true;
                break;
            }
            continue;
        }

        precondition(precond, s, s_hat);
        spmv(system.matrix, s_hat, t);
        const double tt = dot(t, t);
        const double ts = dot(t, s);
        if (!std::isfinite(ts) || tt == 0.0 || std::fabs(ts) <= brk * std::sqrt(tt) * norm2(s)) {
            axpy(alpha, p_hat, x);
            rep.relres_history.push_back(est_half);
            breakdown = true;
            break;
        }
        omega = ts / tt;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        rho_old = rho;

        const double est = meter.relative(r);
        rep.relres_history.push_back(est);
        if (!std::isfinite(est)) {
            breakdown = true;
            break;
        }
        if (est < best_est) {
            best_est = est;
            best_x = x;
        }
        if (est <= cfg.tol && verify()) {
            converged = true;
            break;
        }
    }

    const double rel_last = meter.true_relres(x);
    const double rel_best = meter.true_relres(best_x);
    if (std::isfinite(rel_last) && !(rel_best < rel_last)) {
        rep.final_relres = rel_last;
        out.x = std::move(x);
    } else {
        rep.final_relres = rel_best;
        out.x = std::move(best_x);
    }

    if (converged && rep.final_relres <= cfg.tol) {
        rep.status = SolveStatus::Converged;
    } else if (breakdown) {
        rep.status = SolveStatus::Breakdown;
    } else {
        rep.status = classify_exhausted(rep.relres_history);
    }
    rep.wall_time = seconds_since(t0);
    return out;
}

Vector kaczmarz_sweeps(const LinearSystem& system, std::span<const double> x0, std::size_t sweeps)
{
    system.validate();
    check_same_length(x0.size(), system.size(), "kaczmarz x0");
    const CsrMatrix& a = system.matrix;
    Vector sq(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto row = a.row(i);
        sq[i] = dot(row.vals, row.vals);
        if (sq[i] == 0.0) throw Error("kaczmarz: row " + std::to_string(i) + " is zero");
    }
    Vector x(x0.begin(), x0.end());
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const auto row = a.row(i);
            double ax = 0.0;
            for (std::size_t k = 0; k < row.size(); ++k) ax += row.vals[k] * x[row.cols[k]];
            const double step = (system.rhs[i] - ax) / sq[i];
            for (std::size_t k = 0; k < row.size(); ++k) x[row.cols[k]] += step * row.vals[k];
        }
    }
    return x;
}

} // namespace gsk
