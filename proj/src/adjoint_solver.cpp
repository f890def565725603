#include "hammerflow/adjoint_solver.hpp"

#include "hammerflow/errors.hpp"
#include "hammerflow/time_scaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace hammerflow {

double odd_pow(double x, int gamma) {
    double acc = x;
    for (int m = 1; m < 2 * gamma - 1; ++m) acc *= x;
    return acc;
}

double lambda_boundary(double p_N, const PipelineConfig& cfg) {
    return -(2.0 * cfg.rho * cfg.L * cfg.gamma / cfg.P_bar) *
           odd_pow((p_N - cfg.P) / cfg.P_bar, cfg.gamma);
}

void rhs_costate(std::span<const double> lambda, std::span<const double> mu,
                 std::span<const double> p, std::span<const double> v,
                 double theta_k, const PipelineConfig& cfg, const SpatialGrid& grid,
                 std::span<const double> cost_weights,
                 std::span<double> dlambda, std::span<double> dmu) {
    const int N = grid.N;
    const double fric = cfg.f / cfg.D;  // derivative of v|v| doubles the f/(2D)
    const double rc2dl = cfg.rho * cfg.c * cfg.c / grid.dl;
    const double inv_rdl = 1.0 / (cfg.rho * grid.dl);
    const double gfac = 2.0 * cfg.gamma / cfg.P_bar;
    dlambda[N] = 0.0;
    dmu[0] = 0.0;
    for (int i = 0; i < N; ++i)
        dlambda[i] = theta_k * (lambda[i] * fric * std::abs(v[i]) -
                                rc2dl * (mu[i + 1] - mu[i]));
    for (int i = 1; i <= N; ++i)
        dmu[i] = theta_k * (cost_weights[i] * gfac *
                                odd_pow((p[i] - cfg.P) / cfg.P_bar, cfg.gamma) -
                            inv_rdl * (lambda[i] - lambda[i - 1]));
}

std::vector<double> objective_cost_weights(int N) {
    std::vector<double> w(N + 1, 2.0 / 3.0);
    w[0] = w[N] = 1.0 / 3.0;
    for (int i = 1; i < N; i += 2) w[i] = 4.0 / 3.0;
    return w;
}

namespace {

// Stage values of one replayed Courant substep.
struct StageCache {
    std::vector<double> zp[4], zv[4];  // imposed stage states
    std::vector<double> kp[4], kv[4];  // stage slopes (theta = 1)
    explicit StageCache(int N) {
        for (int q = 0; q < 4; ++q) {
            zp[q].resize(N + 1);
            zv[q].resize(N + 1);
            kp[q].resize(N + 1);
            kv[q].resize(N + 1);
        }
    }
};

} // namespace

AdjointArtifacts adjoint_sweep(const PipelineConfig& cfg,
                               const DiscretizationConfig& disc,
                               const ControlParams& params,
                               const StateTrajectory& state) {
    const int N = disc.N, r = disc.r, M = disc.M;
    const int samples = r * M + 1;
    if (state.p.rows != N + 1 || state.p.cols != samples)
        throw GridMismatchError("state trajectory shape does not match discretization");
    const SpatialGrid grid = SpatialGrid::make(cfg.L, N);
    const double dl = grid.dl;
    const double rc2 = cfg.rho * cfg.c * cfg.c;
    const double gfac = 2.0 * cfg.gamma / cfg.P_bar;

    // Column weights of the objective quadrature: theta-weighted Simpson in s
    // per segment (knot columns collect both neighbours), Simpson in l plus
    // the terminal-node term across nodes.
    std::vector<double> sw(samples, 0.0);
    for (int k = 0; k < r; ++k)
        for (int j = 0; j <= M; ++j) {
            const double coef = (j == 0 || j == M) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            sw[k * M + j] += params.theta[k] * coef / (3.0 * M);
        }
    const std::vector<double> wl = objective_cost_weights(N);
    std::vector<double> cnode(N + 1);
    for (int i = 0; i <= N; ++i) cnode[i] = wl[i] * dl / (cfg.L * cfg.T);
    cnode[N] += 1.0 / cfg.T;

    AdjointArtifacts out;
    out.costate.s_grid = state.s_grid;
    out.costate.lambda = GridSeries(N + 1, samples);
    out.costate.mu = GridSeries(N + 1, samples);
    out.grad_sigma1.assign(r, 0.0);
    out.grad_sigma2.assign(r, 0.0);
    out.grad_theta.assign(r, 0.0);

    // Adjoint of the evolved state entries; the boundary slots stay zero.
    std::vector<double> lam(N + 1, 0.0), mu(N + 1, 0.0);
    const double pscale = -(cfg.T * cfg.L / dl);

    auto store = [&](int j) {
        for (int i = 0; i <= N; ++i) {
            const double lv = pscale * lam[i], mv = pscale * mu[i];
            if (!std::isfinite(lv) || !std::isfinite(mv))
                throw NumericsError("costate blow-up: non-finite value at node " +
                                    std::to_string(i) + ", sample " +
                                    std::to_string(j));
            out.costate.lambda(i, j) = lv;
            out.costate.mu(i, j) = mv;
        }
        out.costate.lambda(N, j) = lambda_boundary(state.p(N, j), cfg);
        out.costate.mu(0, j) = 0.0;
    };
    auto inject = [&](int j) {
        for (int i = 1; i <= N; ++i)
            mu[i] += sw[j] * cnode[i] * gfac *
                     odd_pow((state.p(i, j) - cfg.P) / cfg.P_bar, cfg.gamma);
    };

    const std::vector<double> zerow(N + 1, 0.0);
    std::vector<double> p(N + 1), v(N + 1), pa(N + 1), va(N + 1);
    std::vector<double> bl(N + 1), bm(N + 1), gl(N + 1), gm(N + 1);
    std::vector<double> accl(N + 1), accm(N + 1);
    // Jacobian transpose of the theta = 1 state operator at a stage point.
    auto fzT = [&](const std::vector<double>& zp, const std::vector<double>& zv,
                   std::vector<double>& ol, std::vector<double>& om) {
        rhs_costate(bl, bm, zp, zv, 1.0, cfg, grid, zerow, ol, om);
        for (int i = 0; i <= N; ++i) {
            ol[i] = -ol[i];
            om[i] = -om[i];
        }
    };

    // A[k]: sensitivity of J to a rigid shift of segment k's clock, which is
    // how theta components of earlier segments move its control samples.
    // B[k]: the same samples weighted by their relative position in the
    // segment, the own-theta stretch.
    std::vector<double> A(r, 0.0), B(r, 0.0);

    store(samples - 1);
    inject(samples - 1);

    for (int k = r - 1; k >= 0; --k) {
        const double theta_k = params.theta[k];
        const double dt = theta_k / M;
        const int nsub = substeps_for(dt, cfg.c, grid.dl);
        const double h = dt / nsub;
        const double t_seg = time_map(static_cast<double>(k), params.theta);
        const double s1 = params.sigma1[k], s2 = params.sigma2[k];
        std::vector<StageCache> cache(nsub, StageCache(N));
        double hhat = 0.0;

        for (int m = M - 1; m >= 0; --m) {
            const int col = k * M + m;
            const double t_base = t_seg + theta_k * m / M;
            // Replay the forward substeps from the checkpoint column.
            for (int i = 0; i <= N; ++i) {
                p[i] = state.p(i, col);
                v[i] = state.v(i, col);
            }
            for (int ms = 0; ms < nsub; ++ms) {
                StageCache& sc = cache[ms];
                const double base = ms * h;
                auto stage = [&](int q, std::vector<double>& sp,
                                 std::vector<double>& sv, double off) {
                    sp[0] = cfg.P;
                    sv[N] = s1 * (t_base + (base + off)) + s2;
                    sc.zp[q] = sp;
                    sc.zv[q] = sv;
                    rhs_state(sc.zp[q], sc.zv[q], 1.0, cfg, grid, sc.kp[q], sc.kv[q]);
                };
                stage(0, p, v, 0.0);
                for (int i = 0; i <= N; ++i) {
                    pa[i] = p[i] + 0.5 * h * sc.kp[0][i];
                    va[i] = v[i] + 0.5 * h * sc.kv[0][i];
                }
                stage(1, pa, va, 0.5 * h);
                for (int i = 0; i <= N; ++i) {
                    pa[i] = p[i] + 0.5 * h * sc.kp[1][i];
                    va[i] = v[i] + 0.5 * h * sc.kv[1][i];
                }
                stage(2, pa, va, 0.5 * h);
                for (int i = 0; i <= N; ++i) {
                    pa[i] = p[i] + h * sc.kp[2][i];
                    va[i] = v[i] + h * sc.kv[2][i];
                }
                stage(3, pa, va, h);
                for (int i = 0; i <= N; ++i) {
                    p[i] += h / 6.0 * (sc.kp[0][i] + 2.0 * sc.kp[1][i] +
                                       2.0 * sc.kp[2][i] + sc.kp[3][i]);
                    v[i] += h / 6.0 * (sc.kv[0][i] + 2.0 * sc.kv[1][i] +
                                       2.0 * sc.kv[2][i] + sc.kv[3][i]);
                }
            }

            // Transpose the substeps in reverse. b holds the adjoint of a
            // stage slope; du is the pullback onto the boundary control.
            for (int ms = nsub - 1; ms >= 0; --ms) {
                const StageCache& sc = cache[ms];
                const double base = ms * h;
                std::fill(accl.begin(), accl.end(), 0.0);
                std::fill(accm.begin(), accm.end(), 0.0);
                for (int i = 0; i <= N; ++i)
                    hhat += (lam[i] * (sc.kv[0][i] + 2.0 * sc.kv[1][i] +
                                       2.0 * sc.kv[2][i] + sc.kv[3][i]) +
                             mu[i] * (sc.kp[0][i] + 2.0 * sc.kp[1][i] +
                                      2.0 * sc.kp[2][i] + sc.kp[3][i])) /
                            6.0;
                auto control_pull = [&](double off, double du) {
                    out.grad_sigma1[k] += du * (t_base + (base + off));
                    out.grad_sigma2[k] += du;
                    const double that = du * s1;
                    A[k] += that;
                    B[k] += that * (static_cast<double>(m) / M +
                                    (ms + off / h) / (static_cast<double>(M) * nsub));
                };
                // stage 4 (q = 3)
                for (int i = 0; i <= N; ++i) {
                    bl[i] = h / 6.0 * lam[i];
                    bm[i] = h / 6.0 * mu[i];
                }
                control_pull(h, -(rc2 / dl) * bm[N]);
                fzT(sc.zp[3], sc.zv[3], gl, gm);
                for (int i = 0; i <= N; ++i) {
                    hhat += sc.kp[2][i] * gm[i] + sc.kv[2][i] * gl[i];
                    accl[i] += gl[i];
                    accm[i] += gm[i];
                }
                // stage 3 (q = 2)
                for (int i = 0; i <= N; ++i) {
                    bl[i] = h / 3.0 * lam[i] + h * gl[i];
                    bm[i] = h / 3.0 * mu[i] + h * gm[i];
                }
                control_pull(0.5 * h, -(rc2 / dl) * bm[N]);
                fzT(sc.zp[2], sc.zv[2], gl, gm);
                for (int i = 0; i <= N; ++i) {
                    hhat += 0.5 * (sc.kp[1][i] * gm[i] + sc.kv[1][i] * gl[i]);
                    accl[i] += gl[i];
                    accm[i] += gm[i];
                }
                // stage 2 (q = 1)
                for (int i = 0; i <= N; ++i) {
                    bl[i] = h / 3.0 * lam[i] + 0.5 * h * gl[i];
                    bm[i] = h / 3.0 * mu[i] + 0.5 * h * gm[i];
                }
                control_pull(0.5 * h, -(rc2 / dl) * bm[N]);
                fzT(sc.zp[1], sc.zv[1], gl, gm);
                for (int i = 0; i <= N; ++i) {
                    hhat += 0.5 * (sc.kp[0][i] * gm[i] + sc.kv[0][i] * gl[i]);
                    accl[i] += gl[i];
                    accm[i] += gm[i];
                }
                // stage 1 (q = 0)
                for (int i = 0; i <= N; ++i) {
                    bl[i] = h / 6.0 * lam[i] + 0.5 * h * gl[i];
                    bm[i] = h / 6.0 * mu[i] + 0.5 * h * gm[i];
                }
                control_pull(0.0, -(rc2 / dl) * bm[N]);
                fzT(sc.zp[0], sc.zv[0], gl, gm);
                for (int i = 0; i <= N; ++i) {
                    lam[i] += accl[i] + gl[i];
                    mu[i] += accm[i] + gm[i];
                }
            }
            store(col);
            inject(col);
        }
        // h = theta_k / (M * nsub) carries the stretch of every substep.
        out.grad_theta[k] += hhat / (static_cast<double>(M) * nsub);
    }

    // Explicit appearance of theta in the objective quadrature, and the knot
    // shifts collected in A and B.
    for (int k = 0; k < r; ++k) {
        double expl = 0.0;
        for (int j = 0; j <= M; ++j) {
            const double coef = (j == 0 || j == M) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            double G = 0.0;
            for (int i = 1; i <= N; ++i) {
                const double dev = (state.p(i, k * M + j) - cfg.P) / cfg.P_bar;
                G += cnode[i] * dev * odd_pow(dev, cfg.gamma);
            }
            expl += coef / (3.0 * M) * G;
        }
        out.grad_theta[k] += expl + B[k];
        for (int mseg = k + 1; mseg < r; ++mseg) out.grad_theta[k] += A[mseg];
    }
    return out;
}

CostateTrajectory solve_costate(const PipelineConfig& cfg,
                                const DiscretizationConfig& disc,
                                const ControlParams& params,
                                const StateTrajectory& state) {
    return adjoint_sweep(cfg, disc, params, state).costate;
}

void export_costate_csv(const CostateTrajectory& traj, const PipelineConfig& cfg,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    const SpatialGrid grid = SpatialGrid::make(cfg.L, traj.lambda.rows - 1);
    out << "s,l,lambda,mu\n";
    char buf[140];
    for (int j = 0; j < traj.lambda.cols; ++j) {
        for (int i = 0; i < traj.lambda.rows; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", traj.s_grid[j],
                          grid.nodes[i], traj.lambda(i, j), traj.mu(i, j));
            out << buf;
        }
    }
}

} // namespace hammerflow
