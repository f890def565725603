#include "hammerflow/objective.hpp"

#include "hammerflow/errors.hpp"

#include <cmath>

namespace hammerflow {

namespace {

double even_pow(double x, int gamma) {
    double acc = 1.0;
    for (int m = 0; m < 2 * gamma; ++m) acc *= x;
    return acc;
}

void check_grid(const DiscretizationConfig& disc, int rows, int cols) {
    if (rows != disc.N + 1 || cols != disc.r * disc.M + 1)
        throw GridMismatchError("trajectory shape does not match discretization");
}

} // namespace

double simpson(std::span<const double> y, double h) {
    const int m = static_cast<int>(y.size()) - 1;
    if (m < 2 || m % 2 != 0)
        throw GridMismatchError("Simpson rule needs an even number of subintervals");
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < m; i += 2) odd += y[i];
    for (int i = 2; i < m; i += 2) even += y[i];
    return h / 3.0 * (y[0] + y[m] + 4.0 * odd + 2.0 * even);
}

double objective(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                 const ControlParams& params, const StateTrajectory& state) {
    check_grid(disc, state.p.rows, state.p.cols);
    const int N = disc.N, r = disc.r, M = disc.M;
    const double hs = 1.0 / M;
    const double dl = cfg.L / N;

    // Per-node s-integral accumulated segment by segment with the theta
    // weights, then the terminal node feeds the first term and the Simpson
    // rule over l combines all nodes into the volume term.
    std::vector<double> g(M + 1);
    std::vector<double> node_integral(N + 1, 0.0);
    for (int i = 0; i <= N; ++i) {
        for (int k = 0; k < r; ++k) {
            for (int j = 0; j <= M; ++j)
                g[j] = even_pow((state.p(i, k * M + j) - cfg.P) / cfg.P_bar, cfg.gamma);
            node_integral[i] += params.theta[k] * simpson(g, hs);
        }
    }
    const double term1 = node_integral[N] / cfg.T;
    const double term2 = simpson(node_integral, dl) / (cfg.L * cfg.T);
    return term1 + term2;
}

GradientBundle gradient(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                        const ControlParams& params, const StateTrajectory& state) {
    check_grid(disc, state.p.rows, state.p.cols);
    GradientBundle out;
    out.J = objective(cfg, disc, params, state);
    out.residuals = constraint_residuals(params, cfg);
    AdjointArtifacts art = adjoint_sweep(cfg, disc, params, state);
    out.grad_sigma1 = std::move(art.grad_sigma1);
    out.grad_sigma2 = std::move(art.grad_sigma2);
    out.grad_theta = std::move(art.grad_theta);
    return out;
}

GradientBundle evaluate(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                        const ControlParams& params) {
    StateTrajectory state = simulate(cfg, disc, params);
    return gradient(cfg, disc, params, state);
}

GradientBundle fd_gradient_of(const std::function<double(const ControlParams&)>& fn,
                              const PipelineConfig& cfg,
                              const DiscretizationConfig& disc,
                              const ControlParams& params, double h) {
    if (h <= 0.0) throw ConfigError("fd step must be positive");
    const int r = disc.r;
    GradientBundle out;
    out.J = fn(params);
    out.residuals = constraint_residuals(params, cfg);
    out.grad_sigma1.assign(r, 0.0);
    out.grad_sigma2.assign(r, 0.0);
    out.grad_theta.assign(r, 0.0);

    auto central = [&](std::vector<double> ControlParams::* field, int k,
                       bool bounded) {
        ControlParams work = params;
        double& x = (work.*field)[k];
        const double x0 = x;
        const double step = h * std::max(std::abs(x0), 1.0);
        if (bounded && x0 - step < disc.theta_min)
            throw ConfigError("fd step crosses the theta_min bound at segment " +
                              std::to_string(k + 1));
        x = x0 + step;
        const double jp = fn(work);
        x = x0 - step;
        const double jm = fn(work);
        return (jp - jm) / (2.0 * step);
    };

    for (int k = 0; k < r; ++k) {
        out.grad_sigma1[k] = central(&ControlParams::sigma1, k, false);
        out.grad_sigma2[k] = central(&ControlParams::sigma2, k, false);
        out.grad_theta[k] = central(&ControlParams::theta, k, true);
    }
    return out;
}

GradientBundle fd_gradient(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                           const ControlParams& params, double h) {
    auto fn = [&](const ControlParams& p) {
        StateTrajectory st = simulate(cfg, disc, p);
        return objective(cfg, disc, p, st);
    };
    return fd_gradient_of(fn, cfg, disc, params, h);
}

} // namespace hammerflow
