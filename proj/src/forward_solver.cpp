#include "hammerflow/forward_solver.hpp"

#include "hammerflow/errors.hpp"
#include "hammerflow/time_scaling.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace hammerflow {

SpatialGrid SpatialGrid::make(double L, int N) {
    SpatialGrid g;
    g.N = N;
    g.dl = L / N;
    g.nodes.resize(N + 1);
    for (int i = 0; i <= N; ++i) g.nodes[i] = i * g.dl;
    g.nodes[N] = L;
    return g;
}

std::pair<std::vector<double>, std::vector<double>>
steady_initial_state(const PipelineConfig& cfg, const SpatialGrid& grid) {
    std::vector<double> phi1(grid.N + 1), phi2(grid.N + 1, cfg.u_max);
    const double slope = cfg.f * cfg.rho * cfg.u_max * cfg.u_max / (2.0 * cfg.D);
    for (int i = 0; i <= grid.N; ++i) phi1[i] = cfg.P - slope * grid.nodes[i];
    return {phi1, phi2};
}

void rhs_state(std::span<const double> p, std::span<const double> v,
               double theta_k, const PipelineConfig& cfg, const SpatialGrid& grid,
               std::span<double> dp, std::span<double> dv) {
    const int N = grid.N;
    const double inv_rdl = 1.0 / (cfg.rho * grid.dl);
    const double fric = cfg.f / (2.0 * cfg.D);
    const double rc2dl = cfg.rho * cfg.c * cfg.c / grid.dl;
    dp[0] = 0.0;
    dv[N] = 0.0;
    for (int i = 0; i < N; ++i)
        dv[i] = theta_k * ((p[i] - p[i + 1]) * inv_rdl - fric * v[i] * std::abs(v[i]));
    for (int i = 1; i <= N; ++i)
        dp[i] = theta_k * rc2dl * (v[i - 1] - v[i]);
}

int substeps_for(double dt, double c, double dl) {
    int n = std::max(1, static_cast<int>(std::ceil(c * dt / (kCflMargin * dl))));
    if (n > kMaxSubsteps)
        throw NumericsError(
            "time step too large for wave stability (would need " + std::to_string(n) +
            " substeps); raise M or reduce the segment durations");
    return n;
}

namespace {

struct Workspace {
    std::vector<double> p2, v2, dp1, dv1, dp2, dv2, pa, va;
    explicit Workspace(int N)
        : p2(N + 1), v2(N + 1), dp1(N + 1), dv1(N + 1), dp2(N + 1), dv2(N + 1),
          pa(N + 1), va(N + 1) {}
};

// One RK4 step of physical duration dt for the unscaled system (theta = 1).
// `u` supplies the boundary velocity at an offset within [0, dt]; t-keeping
// is the caller's job. Boundary values are imposed before every stage.
void rk4_step(std::vector<double>& p, std::vector<double>& v, double dt,
              const PipelineConfig& cfg, const SpatialGrid& grid,
              const std::function<double(double)>& u, Workspace& w) {
    const int N = grid.N;
    auto impose = [&](std::vector<double>& pp, std::vector<double>& vv, double off) {
        pp[0] = cfg.P;
        vv[N] = u(off);
    };
    impose(p, v, 0.0);
    rhs_state(p, v, 1.0, cfg, grid, w.dp1, w.dv1);
    for (int i = 0; i <= N; ++i) {
        w.pa[i] = p[i] + 0.5 * dt * w.dp1[i];
        w.va[i] = v[i] + 0.5 * dt * w.dv1[i];
    }
    impose(w.pa, w.va, 0.5 * dt);
    rhs_state(w.pa, w.va, 1.0, cfg, grid, w.dp2, w.dv2);
    for (int i = 0; i <= N; ++i) {
        w.dp1[i] += 2.0 * w.dp2[i];
        w.dv1[i] += 2.0 * w.dv2[i];
        w.pa[i] = p[i] + 0.5 * dt * w.dp2[i];
        w.va[i] = v[i] + 0.5 * dt * w.dv2[i];
    }
    impose(w.pa, w.va, 0.5 * dt);
    rhs_state(w.pa, w.va, 1.0, cfg, grid, w.dp2, w.dv2);
    for (int i = 0; i <= N; ++i) {
        w.dp1[i] += 2.0 * w.dp2[i];
        w.dv1[i] += 2.0 * w.dv2[i];
        w.pa[i] = p[i] + dt * w.dp2[i];
        w.va[i] = v[i] + dt * w.dv2[i];
    }
    impose(w.pa, w.va, dt);
    rhs_state(w.pa, w.va, 1.0, cfg, grid, w.dp2, w.dv2);
    for (int i = 0; i <= N; ++i) {
        p[i] += dt / 6.0 * (w.dp1[i] + w.dp2[i]);
        v[i] += dt / 6.0 * (w.dv1[i] + w.dv2[i]);
    }
    impose(p, v, dt);
}

// Advances over a physical interval of length dt, splitting into substeps as
// required by the Courant margin.
void advance(std::vector<double>& p, std::vector<double>& v, double dt,
             const PipelineConfig& cfg, const SpatialGrid& grid,
             const std::function<double(double)>& u, Workspace& w) {
    const int n = substeps_for(dt, cfg.c, grid.dl);
    const double h = dt / n;
    for (int m = 0; m < n; ++m) {
        const double base = m * h;
        rk4_step(p, v, h, cfg, grid, [&](double off) { return u(base + off); }, w);
    }
}

void check_finite(const std::vector<double>& p, const std::vector<double>& v, int j) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || !std::isfinite(v[i]))
            throw NumericsError("state blow-up: non-finite value at node " +
                                std::to_string(i) + ", sample " + std::to_string(j));
    }
}

} // namespace

StateTrajectory simulate(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                         const ControlParams& params) {
    validate_params(params, disc);
    const SpatialGrid grid = SpatialGrid::make(cfg.L, disc.N);
    const int r = disc.r, M = disc.M, N = disc.N;
    const int samples = r * M + 1;

    StateTrajectory traj;
    traj.params_used = params;
    traj.s_grid.resize(samples);
    for (int j = 0; j < samples; ++j) traj.s_grid[j] = static_cast<double>(j) / M;
    traj.s_grid[samples - 1] = static_cast<double>(r);
    traj.p = GridSeries(N + 1, samples);
    traj.v = GridSeries(N + 1, samples);

    auto [p, v] = steady_initial_state(cfg, grid);
    v[N] = control_value(0.0, params);
    for (int i = 0; i <= N; ++i) {
        traj.p(i, 0) = p[i];
        traj.v(i, 0) = v[i];
    }

    Workspace w(N);
    for (int k = 0; k < r; ++k) {
        const double theta_k = params.theta[k];
        const double t0 = time_map(static_cast<double>(k), params.theta);
        const double s1 = params.sigma1[k], s2 = params.sigma2[k];
        for (int m = 0; m < M; ++m) {
            // Boundary control within segment k is linear in physical time.
            const double t_base = t0 + theta_k * m / M;
            auto u = [&](double off) { return s1 * (t_base + off) + s2; };
            advance(p, v, theta_k / M, cfg, grid, u, w);
            const int j = k * M + m + 1;
            check_finite(p, v, j);
            // Right-continuous control convention: at a knot the stored (and
            // carried) boundary velocity belongs to the next segment.
            v[N] = control_value(traj.s_grid[j], params);
            for (int i = 0; i <= N; ++i) {
                traj.p(i, j) = p[i];
                traj.v(i, j) = v[i];
            }
        }
    }
    return traj;
}

PhysicalTrajectory simulate_physical(const PipelineConfig& cfg, int N, double dt,
                                     const std::function<double(double)>& control) {
    if (dt <= 0.0) throw NumericsError("dt must be positive");
    const double steps_real = cfg.T / dt;
    const int steps = static_cast<int>(std::llround(steps_real));
    if (steps < 1 || std::abs(steps_real - steps) > 1e-9 * steps)
        throw NumericsError("horizon T is not an integer multiple of dt");
    std::vector<double> nodes(steps + 1);
    for (int j = 0; j <= steps; ++j) nodes[j] = j * dt;
    nodes[steps] = cfg.T;
    return simulate_physical_at(cfg, N, nodes, control);
}

PhysicalTrajectory simulate_physical_at(const PipelineConfig& cfg, int N,
                                        std::span<const double> time_nodes,
                                        const std::function<double(double)>& control) {
    if (time_nodes.empty() || time_nodes[0] != 0.0)
        throw NumericsError("time nodes must start at 0");
    const SpatialGrid grid = SpatialGrid::make(cfg.L, N);
    const int samples = static_cast<int>(time_nodes.size());

    PhysicalTrajectory traj;
    traj.t_grid.assign(time_nodes.begin(), time_nodes.end());
    traj.p = GridSeries(N + 1, samples);
    traj.v = GridSeries(N + 1, samples);

    auto [p, v] = steady_initial_state(cfg, grid);
    v[N] = control(0.0);
    for (int i = 0; i <= N; ++i) {
        traj.p(i, 0) = p[i];
        traj.v(i, 0) = v[i];
    }

    Workspace w(N);
    for (int j = 1; j < samples; ++j) {
        const double t0 = time_nodes[j - 1];
        const double dt = time_nodes[j] - t0;
        if (dt <= 0.0) throw NumericsError("time nodes must be strictly increasing");
        advance(p, v, dt, cfg, grid, [&](double off) { return control(t0 + off); }, w);
        check_finite(p, v, j);
        for (int i = 0; i <= N; ++i) {
            traj.p(i, j) = p[i];
            traj.v(i, j) = v[i];
        }
    }
    return traj;
}

void export_state_csv(const StateTrajectory& traj, const PipelineConfig& cfg,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    const SpatialGrid grid = SpatialGrid::make(cfg.L, traj.p.rows - 1);
    out << "s,t,l,p,v\n";
    char buf[160];
    for (int j = 0; j < traj.p.cols; ++j) {
        const double s = traj.s_grid[j];
        const double t = time_map(s, traj.params_used.theta);
        for (int i = 0; i < traj.p.rows; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", s, t,
                          grid.nodes[i], traj.p(i, j), traj.v(i, j));
            out << buf;
        }
    }
}

} // namespace hammerflow
