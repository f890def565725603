#pragma once

#include "hammerflow/adjoint_solver.hpp"
#include "hammerflow/config.hpp"
#include "hammerflow/forward_solver.hpp"
#include "hammerflow/time_scaling.hpp"

#include <functional>
#include <span>

namespace hammerflow {

/// Objective value, analytic gradients and constraint residuals at one point.
struct GradientBundle {
    double J = 0.0;
    std::vector<double> grad_sigma1;
    std::vector<double> grad_sigma2;
    std::vector<double> grad_theta;
    ConstraintResiduals residuals;
};

/// Composite Simpson over m (even) subintervals of width h; y has m+1 values.
double simpson(std::span<const double> y, double h);

/// Transformed objective: terminal-node term plus volume term, both via
/// composite Simpson on the shared s and l grids.
double objective(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                 const ControlParams& params, const StateTrajectory& state);

/// Analytic gradients via the discrete adjoint sweep over the trajectory.
GradientBundle gradient(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                        const ControlParams& params, const StateTrajectory& state);

/// Convenience: forward solve + adjoint sweep.
GradientBundle evaluate(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                        const ControlParams& params);

/// Central finite differences of an arbitrary functional of the params;
/// scale_i = max(|x_i|, 1), step = h * scale_i per coordinate.
GradientBundle fd_gradient_of(const std::function<double(const ControlParams&)>& fn,
                              const PipelineConfig& cfg,
                              const DiscretizationConfig& disc,
                              const ControlParams& params, double h);

/// Finite-difference gradient oracle of the simulated objective.
GradientBundle fd_gradient(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                           const ControlParams& params, double h);

} // namespace hammerflow
