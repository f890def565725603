#pragma once

#include "hammerflow/config.hpp"
#include "hammerflow/forward_solver.hpp"
#include "hammerflow/grid.hpp"

#include <span>
#include <string>

namespace hammerflow {

/// Costate history on the same grid as the state trajectory.
struct CostateTrajectory {
    std::vector<double> s_grid;
    GridSeries lambda;  ///< momentum-equation multiplier
    GridSeries mu;      ///< continuity-equation multiplier
};

/// x^(2*gamma-1) with the sign of x (odd integer power).
double odd_pow(double x, int gamma);

/// Boundary value of lambda at the terminus node, driven by the pressure
/// deviation there.
double lambda_boundary(double p_N, const PipelineConfig& cfg);

/// Semi-discrete costate right-hand side. Expects mu[0] = 0 and lambda[N]
/// imposed from the state before the call. Writes dlambda[0..N-1] and
/// dmu[1..N]; the imposed slots are set to zero. cost_weights[i] scales the
/// pressure-deviation forcing at node i; passing all ones gives the plain
/// (rectangle-rule) costate, while solve_costate passes the Simpson weights
/// of the objective's spatial integral so the costate is the exact adjoint
/// of the discretized objective.
void rhs_costate(std::span<const double> lambda, std::span<const double> mu,
                 std::span<const double> p, std::span<const double> v,
                 double theta_k, const PipelineConfig& cfg, const SpatialGrid& grid,
                 std::span<const double> cost_weights,
                 std::span<double> dlambda, std::span<double> dmu);

/// Simpson weights over the spatial nodes divided by dl: {1/3, 4/3, 2/3,
/// ..., 4/3, 1/3}. These make the costate forcing consistent with the
/// Simpson-in-l objective quadrature.
std::vector<double> objective_cost_weights(int N);

/// Costate trajectory together with the raw objective gradients produced by
/// the same backward sweep.
struct AdjointArtifacts {
    CostateTrajectory costate;
    std::vector<double> grad_sigma1;
    std::vector<double> grad_sigma2;
    std::vector<double> grad_theta;
};

/// Backward sweep of the discrete adjoint. The stored state columns act as
/// checkpoints: each Courant substep of the forward integrator is replayed
/// and then transposed stage by stage, so the resulting gradients
/// differentiate the computed objective exactly (finite differences agree to
/// their own truncation error, independent of grid resolution). The costate
/// samples are the adjoint variables in the multiplier scaling of the
/// continuous optimality system: they converge to the solution of the costate
/// PDE as the grids refine.
AdjointArtifacts adjoint_sweep(const PipelineConfig& cfg,
                               const DiscretizationConfig& disc,
                               const ControlParams& params,
                               const StateTrajectory& state);

/// Costate history only; see adjoint_sweep.
CostateTrajectory solve_costate(const PipelineConfig& cfg,
                                const DiscretizationConfig& disc,
                                const ControlParams& params,
                                const StateTrajectory& state);

/// CSV export, header `s,l,lambda,mu`, same conventions as the state export.
void export_costate_csv(const CostateTrajectory& traj, const PipelineConfig& cfg,
                        const std::string& path);

} // namespace hammerflow
