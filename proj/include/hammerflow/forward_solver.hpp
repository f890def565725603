#pragma once

#include "hammerflow/config.hpp"
#include "hammerflow/grid.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hammerflow {

/// Full state history on the (space x scaled-time) grid.
struct StateTrajectory {
    std::vector<double> s_grid;  ///< r*M + 1 uniform samples in [0, r]
    GridSeries p;                ///< pressures [Pa], (N+1) x (r*M+1)
    GridSeries v;                ///< velocities [m/s], same shape
    ControlParams params_used;
};

/// State history in physical time (baseline simulator output).
struct PhysicalTrajectory {
    std::vector<double> t_grid;
    GridSeries p;
    GridSeries v;
};

/// Friction-balanced steady profile: v = u_max, dp/dl cancels the friction
/// term. Returns (phi1 pressures, phi2 velocities) at the grid nodes.
std::pair<std::vector<double>, std::vector<double>>
steady_initial_state(const PipelineConfig& cfg, const SpatialGrid& grid);

/// Semi-discrete right-hand side in scaled time. Expects p[0] = P and
/// v[N] = u already imposed. Writes dv[0..N-1] and dp[1..N]; the
/// boundary-driven slots dv[N] and dp[0] are set to zero.
void rhs_state(std::span<const double> p, std::span<const double> v,
               double theta_k, const PipelineConfig& cfg, const SpatialGrid& grid,
               std::span<double> dp, std::span<double> dv);

/// Integrates the time-scaled system forward over s in [0, r] with classical
/// RK4 on the 1/M grid. Steps whose wave Courant number exceeds the stability
/// margin are split into equal substeps; stored samples stay on the 1/M grid.
StateTrajectory simulate(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                         const ControlParams& params);

/// Physical-time simulator for arbitrary controls (baselines). Fixed step dt;
/// the horizon cfg.T must be an integer multiple of dt.
PhysicalTrajectory simulate_physical(const PipelineConfig& cfg, int N, double dt,
                                     const std::function<double(double)>& control);

/// Variant stepping exactly between the given time nodes (node 0 must be 0).
PhysicalTrajectory simulate_physical_at(const PipelineConfig& cfg, int N,
                                        std::span<const double> time_nodes,
                                        const std::function<double(double)>& control);

/// CSV export, header `s,t,l,p,v`, row-major over (sample, node), 17
/// significant digits.
void export_state_csv(const StateTrajectory& traj, const PipelineConfig& cfg,
                      const std::string& path);

/// Substep count keeping the wave Courant number c*dt/(dl*n) within margin.
/// Throws NumericsError when more than max_substeps would be needed.
int substeps_for(double dt, double c, double dl);

inline constexpr double kCflMargin = 0.9;
inline constexpr int kMaxSubsteps = 64;

} // namespace hammerflow
