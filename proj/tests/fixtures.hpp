#pragma once

#include "hammerflow/config.hpp"

#include <random>
#include <vector>

namespace fixtures {

/// Reference pipeline: 100 m pipe, water, 1200 m/s wave speed, 10 s horizon.
inline hammerflow::PipelineConfig pipeline() {
    hammerflow::PipelineConfig cfg;
    cfg.L = 100.0;
    cfg.D = 0.1;
    cfg.rho = 1000.0;
    cfg.c = 1200.0;
    cfg.f = 0.03;
    cfg.P = 2e5;
    cfg.P_bar = 1e5;
    cfg.gamma = 2;
    cfg.u_max = 2.0;
    cfg.T = 10.0;
    return cfg;
}

inline hammerflow::DiscretizationConfig resolution(int N, int r, int M,
                                                   double theta_min = 1e-3) {
    hammerflow::DiscretizationConfig disc;
    disc.N = N;
    disc.r = r;
    disc.M = M;
    disc.theta_min = theta_min;
    return disc;
}

/// Published optimal parameters for the reference pipeline (r = 10).
inline hammerflow::ControlParams reference_params() {
    hammerflow::ControlParams p;
    p.sigma1 = {-0.4426, -0.3106, -0.2692, -0.1856, -0.1223,
                -0.1528, -0.1544, -0.1383, -0.1478, -0.1334};
    p.sigma2 = {2.0000, 1.9108, 1.8241, 1.5972, 1.3379,
                1.4811, 1.4908, 1.3866, 1.4580, 1.3343};
    p.theta = {0.6757, 1.1493, 0.6207, 1.3797, 0.6029,
               1.3668, 0.4275, 1.0306, 1.0598, 1.4169};
    return p;
}

/// Piecewise-linear control through the given velocity knots; satisfies the
/// continuity constraints exactly by construction.
inline hammerflow::ControlParams from_knots(const std::vector<double>& theta,
                                            const std::vector<double>& u_knots) {
    const int r = static_cast<int>(theta.size());
    hammerflow::ControlParams p;
    p.theta = theta;
    p.sigma1.resize(r);
    p.sigma2.resize(r);
    double t_prev = 0.0;
    for (int k = 0; k < r; ++k) {
        const double t_next = t_prev + theta[k];
        p.sigma1[k] = (u_knots[k + 1] - u_knots[k]) / (t_next - t_prev);
        p.sigma2[k] = u_knots[k] - p.sigma1[k] * t_prev;
        t_prev = t_next;
    }
    return p;
}

/// Random feasible point: durations in [0.5, 1.5] * T / r renormalized to sum
/// T, interior velocity knots uniform in (0, u_max), endpoints pinned to
/// u_max and 0.
inline hammerflow::ControlParams random_feasible(std::mt19937& rng,
                                                 const hammerflow::PipelineConfig& cfg,
                                                 int r) {
    std::uniform_real_distribution<double> dur(0.5, 1.5);
    std::vector<double> theta(r);
    double total = 0.0;
    for (double& th : theta) total += (th = dur(rng) * cfg.T / r);
    for (double& th : theta) th *= cfg.T / total;

    std::uniform_real_distribution<double> vel(0.05, 0.95);
    std::vector<double> knots(r + 1);
    knots[0] = cfg.u_max;
    knots[r] = 0.0;
    for (int j = 1; j < r; ++j) knots[j] = vel(rng) * cfg.u_max;
    return from_knots(theta, knots);
}

} // namespace fixtures
