#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsk/csr_matrix.hpp"
#include "gsk/ilut.hpp"
#include "gsk/scaling.hpp"

namespace gsk {

enum class SolveStatus { Converged, MaxIters, Breakdown, Stagnation };

std::string to_string(SolveStatus s);

struct SolveConfig {
    double tol = 1e-7;
    std::size_t max_iters = 10000;
    /// Krylov subspace size m of GMRES(m).
    std::size_t restart = 10;
    /// Initial guess; empty means the zero vector.
    Vector x0;
    /// Multiplier on DBL_EPSILON for the Bi-CGSTAB breakdown tests.
    double brkdown_scale = 1e-16;
    /// Measure the stopping residual on the GS(2)-scaled system. When false the
    /// plain residual of the system being solved is used.
    bool residual_frame = true;
    /// Explicit measurement frame: residual components of the system being
    /// solved are multiplied by frame->diag before taking the 2-norm. Needed when
    /// the solved system is not a row scaling of the original (two-sided scaling).
    std::optional<DiagScaling> frame;

    void validate() const;
};

struct SolveReport {
    SolveStatus status = SolveStatus::MaxIters;
    /// GMRES: inner steps (one matrix-vector product each).
    /// Bi-CGSTAB: full iterations (two matrix-vector products each).
    std::size_t iterations = 0;
    /// True relative residual of the returned iterate, recomputed from scratch.
    double final_relres = 1.0;
    /// Per-iteration relative residual as seen by the stopping test.
    std::vector<double> relres_history;
    /// GMRES only: least-squares residual norm |g_{j+1}| after every inner step.
    std::vector<double> ls_history;
    /// Iteration indices at which a GMRES cycle started.
    std::vector<std::size_t> cycle_starts;
    double wall_time = 0.0;
    std::string solver;
};

struct SolveResult {
    Vector x;
    SolveReport report;
};

/// Weights w such that the stopping residual is ||w .* (b - A x)||.
Vector frame_weights(const LinearSystem& system, const SolveConfig& cfg);

/// ||D (b - A x)|| / ||D (b - A x0)|| with D the given frame, or the GS(2)
/// scaling of `original` when no frame is given.
double true_relres(const LinearSystem& original, std::span<const double> x,
                   std::span<const double> x0, const std::optional<DiagScaling>& frame = {});

/// Restarted GMRES(m) with double classical Gram-Schmidt and Givens rotations,
/// right preconditioned. Returns the best iterate found.
SolveResult gmres(const LinearSystem& system, const IluFactors* precond, const SolveConfig& cfg);

/// Right-preconditioned Bi-CGSTAB with breakdown detection.
SolveResult bicgstab(const LinearSystem& system, const IluFactors* precond,
                     const SolveConfig& cfg);

/// Cyclic Kaczmarz: `sweeps` passes over the rows, each step projecting the
/// iterate onto the hyperplane of one equation.
Vector kaczmarz_sweeps(const LinearSystem& system, std::span<const double> x0,
                       std::size_t sweeps);

} // namespace gsk
