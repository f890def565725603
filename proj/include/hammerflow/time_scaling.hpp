#pragma once

#include "hammerflow/config.hpp"

#include <span>
#include <vector>

namespace hammerflow {

/// Left-minus-right values of the equality constraints on the decision vector.
struct ConstraintResiduals {
    std::vector<double> continuity;  ///< r-1 knot mismatches [m/s]
    double initial = 0.0;            ///< sigma2_1 - u_max [m/s]
    double terminal = 0.0;           ///< sigma1_r * T + sigma2_r [m/s]
    double total_time = 0.0;         ///< sum(theta) - T [s]

    /// Largest residual magnitude after scaling velocities by u_max and time by T.
    double max_scaled(double u_max, double T) const;
};

/// Segment index for scaled time s in [0, r]; right-continuous at knots,
/// s = r clamped into the last segment. Returns 0-based index.
int segment_index(double s, int r);

/// Piecewise-linear time map t = psi(s | theta). Throws on s outside [0, r].
double time_map(double s, std::span<const double> theta);

/// Inverse of time_map on [0, sum(theta)]; used for reporting in physical time.
double inverse_time_map(double t, std::span<const double> theta);

/// Transformed control u^r(s; sigma, theta) = sigma1_k * psi(s) + sigma2_k.
double control_value(double s, const ControlParams& params);

/// Control as a function of physical time t in [0, t_r].
double control_value_physical(double t, const ControlParams& params);

ConstraintResiduals constraint_residuals(const ControlParams& params,
                                         const PipelineConfig& cfg);

} // namespace hammerflow
