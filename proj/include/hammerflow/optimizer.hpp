#pragma once

#include "hammerflow/config.hpp"
#include "hammerflow/objective.hpp"

#include <string>
#include <vector>

namespace hammerflow {

enum class OptimStatus { converged, max_iters, line_search_failure };

const char* to_string(OptimStatus status);

/// Augmented-Lagrangian solver knobs.
struct OptimOptions {
    int max_iters = 500;
    double tol_obj = 1e-6;         ///< relative objective stall tolerance
    double tol_constraint = 1e-6;  ///< feasibility tolerance on max |residual|
    double penalty_init = 10.0;
    double penalty_growth = 10.0;
    double ls_shrink = 0.5;
    double ls_c1 = 1e-4;

    void validate() const;  ///< throws ConfigError on nonsense values
};

struct HistoryRow {
    int iter = 0;
    double J = 0.0;
    double residual_max = 0.0;
    double step = 0.0;
};

struct OptimResult {
    ControlParams params;
    double J = 0.0;
    double residual_max = 0.0;
    std::vector<HistoryRow> history;
    OptimStatus status = OptimStatus::max_iters;
};

/// Uniform segment durations and one global linear ramp from u_max to zero;
/// satisfies every equality constraint exactly.
ControlParams initial_guess(const PipelineConfig& cfg, const DiscretizationConfig& disc);

/// Minimizes the objective over (sigma1, sigma2, theta). sigma2_1 is pinned to
/// u_max by elimination; the remaining equalities (continuity, terminal,
/// total time) enter an augmented Lagrangian with scaled residuals, minimized
/// by projected gradient steps (theta >= theta_min) with a Barzilai-Borwein
/// step guess and Armijo backtracking. Deterministic. Throws OptimError when
/// the initial point is infeasible beyond tol_constraint.
OptimResult optimize(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                     const ControlParams& init, const OptimOptions& opts);

/// Same loop with theta frozen at its initial values: the knots are fixed,
/// the total-time constraint drops out.
OptimResult optimize_fixed_grid(const PipelineConfig& cfg,
                                const DiscretizationConfig& disc,
                                const ControlParams& init, const OptimOptions& opts);

/// CSV export, header `iter,J,residual_max,step`.
void export_history_csv(const OptimResult& result, const std::string& path);

} // namespace hammerflow
