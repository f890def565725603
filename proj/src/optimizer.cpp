#include "hammerflow/optimizer.hpp"

#include "hammerflow/errors.hpp"
#include "hammerflow/forward_solver.hpp"
#include "hammerflow/time_scaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

namespace hammerflow {

const char* to_string(OptimStatus status) {
    switch (status) {
        case OptimStatus::converged: return "converged";
        case OptimStatus::max_iters: return "max_iters";
        case OptimStatus::line_search_failure: return "line_search_failure";
    }
    return "unknown";
}

void OptimOptions::validate() const {
    if (max_iters < 0) throw ConfigError("max_iters must be nonnegative");
    if (tol_obj <= 0.0 || tol_constraint <= 0.0)
        throw ConfigError("tolerances must be positive");
    if (penalty_init <= 0.0 || penalty_growth <= 1.0)
        throw ConfigError("penalty_init must be positive and penalty_growth > 1");
    if (ls_shrink <= 0.0 || ls_shrink >= 1.0 || ls_c1 <= 0.0 || ls_c1 >= 1.0)
        throw ConfigError("line-search parameters must lie in (0, 1)");
}

ControlParams initial_guess(const PipelineConfig& cfg, const DiscretizationConfig& disc) {
    ControlParams p;
    p.sigma1.assign(disc.r, -cfg.u_max / cfg.T);
    p.sigma2.assign(disc.r, cfg.u_max);
    p.theta.assign(disc.r, cfg.T / disc.r);
    return p;
}

namespace {

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double linf(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

// Augmented-Lagrangian subproblem data. sigma2_1 is eliminated (pinned to
// u_max); in fixed-grid mode theta stays out of the decision vector and the
// total-time constraint is dropped.
struct Problem {
    const PipelineConfig& cfg;
    const DiscretizationConfig& disc;
    bool fixed_grid;
    std::vector<double> theta_fixed;

    int r() const { return disc.r; }
    int dim() const { return fixed_grid ? 2 * r() - 1 : 3 * r() - 1; }
    int ncon() const { return fixed_grid ? r() : r() + 1; }

    ControlParams decode(std::span<const double> x) const {
        const int n = r();
        ControlParams p;
        p.sigma1.assign(x.begin(), x.begin() + n);
        p.sigma2.resize(n);
        p.sigma2[0] = cfg.u_max;
        for (int k = 1; k < n; ++k) p.sigma2[k] = x[n + k - 1];
        p.theta = fixed_grid ? theta_fixed
                             : std::vector<double>(x.begin() + 2 * n - 1, x.end());
        return p;
    }

    std::vector<double> encode(const ControlParams& p) const {
        std::vector<double> x;
        x.reserve(dim());
        x.insert(x.end(), p.sigma1.begin(), p.sigma1.end());
        x.insert(x.end(), p.sigma2.begin() + 1, p.sigma2.end());
        if (!fixed_grid) x.insert(x.end(), p.theta.begin(), p.theta.end());
        return x;
    }

    void project(std::vector<double>& x) const {
        if (fixed_grid) return;
        const int n = r();
        for (int k = 0; k < n; ++k)
            x[2 * n - 1 + k] = std::max(x[2 * n - 1 + k], disc.theta_min);
    }

    // Scaled equality residuals: continuity knots and the terminal value in
    // units of u_max, the total time in units of T.
    std::vector<double> constraints(const ControlParams& p) const {
        const int n = r();
        std::vector<double> c(ncon());
        double t = 0.0;
        for (int j = 0; j + 1 < n; ++j) {
            t += p.theta[j];
            c[j] = ((p.sigma1[j] - p.sigma1[j + 1]) * t + p.sigma2[j] -
                    p.sigma2[j + 1]) /
                   cfg.u_max;
        }
        c[n - 1] = (p.sigma1[n - 1] * cfg.T + p.sigma2[n - 1]) / cfg.u_max;
        if (!fixed_grid) {
            double sum = 0.0;
            for (double th : p.theta) sum += th;
            c[n] = (sum - cfg.T) / cfg.T;
        }
        return c;
    }

    // Adds sum_i w_i * grad c_i(x) into g (x layout).
    void add_constraint_grad(const ControlParams& p, std::span<const double> w,
                             std::vector<double>& g) const {
        const int n = r();
        const double iu = 1.0 / cfg.u_max;
        double t = 0.0;
        for (int j = 0; j + 1 < n; ++j) {
            t += p.theta[j];
            const double wj = w[j] * iu;
            g[j] += wj * t;
            g[j + 1] -= wj * t;
            if (j >= 1) g[n + j - 1] += wj;
            g[n + j] -= wj;
            if (!fixed_grid)
                for (int m = 0; m <= j; ++m)
                    g[2 * n - 1 + m] += wj * (p.sigma1[j] - p.sigma1[j + 1]);
        }
        const double wt = w[n - 1] * iu;
        g[n - 1] += wt * cfg.T;
        if (n >= 2) g[2 * n - 2] += wt;
        if (!fixed_grid)
            for (int m = 0; m < n; ++m) g[2 * n - 1 + m] += w[n] / cfg.T;
    }
};

struct Point {
    std::vector<double> x;
    ControlParams params;
    double J = 0.0;
    std::vector<double> c;
    double phi = 0.0;
};

OptimResult run(const Problem& prob, const ControlParams& init,
                const OptimOptions& opts) {
    opts.validate();
    validate_params(init, prob.disc);
    const PipelineConfig& cfg = prob.cfg;

    if (std::abs(init.sigma2[0] - cfg.u_max) > opts.tol_constraint * cfg.u_max)
        throw OptimError("initial point violates sigma2_1 = u_max");
    {
        const auto c0 = prob.constraints(init);
        if (linf(c0) > opts.tol_constraint)
            throw OptimError(
                "initial point violates the equality constraints beyond "
                "tol_constraint");
    }

    std::vector<double> eta(prob.ncon(), 0.0);
    double rho = opts.penalty_init;

    auto merit = [&](double J, std::span<const double> c) {
        double phi = J;
        for (int i = 0; i < prob.ncon(); ++i)
            phi += eta[i] * c[i] + 0.5 * rho * c[i] * c[i];
        return phi;
    };
    // Objective-only trial evaluation; integrator blow-up rejects the trial.
    auto try_point = [&](std::vector<double> x) -> std::optional<Point> {
        Point pt;
        pt.x = std::move(x);
        pt.params = prob.decode(pt.x);
        try {
            StateTrajectory st = simulate(cfg, prob.disc, pt.params);
            pt.J = objective(cfg, prob.disc, pt.params, st);
        } catch (const NumericsError&) {
            return std::nullopt;
        }
        if (!std::isfinite(pt.J)) return std::nullopt;
        pt.c = prob.constraints(pt.params);
        pt.phi = merit(pt.J, pt.c);
        return pt;
    };
    auto grad_phi = [&](const Point& pt) {
        GradientBundle b = evaluate(cfg, prob.disc, pt.params);
        const int n = prob.r();
        std::vector<double> g(prob.dim(), 0.0);
        for (int k = 0; k < n; ++k) g[k] = b.grad_sigma1[k];
        for (int k = 1; k < n; ++k) g[n + k - 1] = b.grad_sigma2[k];
        if (!prob.fixed_grid)
            for (int k = 0; k < n; ++k) g[2 * n - 1 + k] = b.grad_theta[k];
        std::vector<double> w(prob.ncon());
        for (int i = 0; i < prob.ncon(); ++i) w[i] = eta[i] + rho * pt.c[i];
        prob.add_constraint_grad(pt.params, w, g);
        return g;
    };

    OptimResult res;
    std::vector<double> x0 = prob.encode(init);
    prob.project(x0);
    auto cur_opt = try_point(std::move(x0));
    if (!cur_opt) {
        // the very first evaluation must succeed; replay to surface the blow-up
        simulate(cfg, prob.disc, init);
        throw NumericsError("objective not finite at the initial point");
    }
    Point cur = std::move(*cur_opt);
    res.history.push_back({0, cur.J, linf(cur.c), 0.0});

    int it = 0;
    bool converged = false;
    double resid_ref = std::max(linf(cur.c), opts.tol_constraint);
    int barren_outers = 0;  // consecutive outer rounds without an accepted step
    const int max_outer = 40;

    for (int outer = 0; outer < max_outer && it < opts.max_iters && !converged;
         ++outer) {
        cur.phi = merit(cur.J, cur.c);
        std::vector<double> g = grad_phi(cur);
        double alpha_next = 1.0 / (norm2(g) + 1.0);
        bool any_accepted = false;
        double last_relJ = 0.0;

        while (it < opts.max_iters) {
            double alpha = std::clamp(alpha_next, 1e-12, 1e12);
            std::optional<Point> trial;
            double step_norm = 0.0;
            while (alpha >= 1e-16) {
                std::vector<double> xt(prob.dim());
                for (int i = 0; i < prob.dim(); ++i) xt[i] = cur.x[i] - alpha * g[i];
                prob.project(xt);
                std::vector<double> d(prob.dim());
                for (int i = 0; i < prob.dim(); ++i) d[i] = xt[i] - cur.x[i];
                step_norm = norm2(d);
                if (step_norm <= 1e-14 * (1.0 + norm2(cur.x))) break;  // projection stall
                auto t = try_point(std::move(xt));
                if (t && t->phi <=
                             cur.phi - opts.ls_c1 / alpha * step_norm * step_norm) {
                    trial = std::move(t);
                    break;
                }
                alpha *= opts.ls_shrink;
            }
            if (!trial) break;  // stalled or line search exhausted

            ++it;
            any_accepted = true;
            std::vector<double> gt = grad_phi(*trial);
            // Barzilai-Borwein step for the next iteration.
            double ss = 0.0, sy = 0.0;
            for (int i = 0; i < prob.dim(); ++i) {
                const double si = trial->x[i] - cur.x[i];
                ss += si * si;
                sy += si * (gt[i] - g[i]);
            }
            alpha_next = sy > 0.0 ? ss / sy : 1.0 / (norm2(gt) + 1.0);
            last_relJ = std::abs(trial->J - cur.J) / std::max(1.0, std::abs(cur.J));
            const double rel_phi =
                (cur.phi - trial->phi) / std::max(1.0, std::abs(cur.phi));
            cur = std::move(*trial);
            g = std::move(gt);
            res.history.push_back({it, cur.J, linf(cur.c), step_norm});
            if (rel_phi < opts.tol_obj) break;  // merit progress exhausted
        }

        const double cmax = linf(cur.c);
        if (cmax <= opts.tol_constraint && last_relJ < opts.tol_obj) {
            converged = true;
            break;
        }
        barren_outers = any_accepted ? 0 : barren_outers + 1;
        if (barren_outers >= 2) {
            res.status = OptimStatus::line_search_failure;
            res.params = cur.params;
            res.J = cur.J;
            res.residual_max = cmax;
            return res;
        }
        for (int i = 0; i < prob.ncon(); ++i) eta[i] += rho * cur.c[i];
        if (cmax > 0.25 * resid_ref) rho *= opts.penalty_growth;
        resid_ref = std::max(cmax, opts.tol_constraint);
    }

    res.status = converged ? OptimStatus::converged : OptimStatus::max_iters;
    res.params = cur.params;
    res.J = cur.J;
    res.residual_max = linf(cur.c);
    return res;
}

} // namespace

OptimResult optimize(const PipelineConfig& cfg, const DiscretizationConfig& disc,
                     const ControlParams& init, const OptimOptions& opts) {
    Problem prob{cfg, disc, false, {}};
    return run(prob, init, opts);
}

OptimResult optimize_fixed_grid(const PipelineConfig& cfg,
                                const DiscretizationConfig& disc,
                                const ControlParams& init, const OptimOptions& opts) {
    Problem prob{cfg, disc, true, init.theta};
    return run(prob, init, opts);
}

void export_history_csv(const OptimResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "iter,J,residual_max,step\n";
    char buf[120];
    for (const HistoryRow& row : result.history) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", row.iter, row.J,
                      row.residual_max, row.step);
        out << buf;
    }
}

} // namespace hammerflow
