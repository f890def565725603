// Acceptance suite: one pass/fail line per criterion.
#include "hammerflow/errors.hpp"
#include "hammerflow/forward_solver.hpp"
#include "hammerflow/objective.hpp"
#include "hammerflow/optimizer.hpp"
#include "hammerflow/time_scaling.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace hammerflow;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool expected_divergence;  // documented red: reported but not a build failure
    std::function<bool(std::string&)> check;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// --- 1. gradient fidelity ---------------------------------------------------
bool gradient_fidelity(std::string& detail) {
    PipelineConfig cfg = fixtures::pipeline();
    DiscretizationConfig disc = fixtures::resolution(10, 5, 40);
    std::mt19937 rng(20240817);
    double worst_rel = 0.0, worst_abs = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        ControlParams p = fixtures::random_feasible(rng, cfg, disc.r);
        GradientBundle adj = evaluate(cfg, disc, p);
        GradientBundle fd = fd_gradient(cfg, disc, p, 1e-5);
        auto compare = [&](const std::vector<double>& a, const std::vector<double>& b) {
            for (std::size_t k = 0; k < a.size(); ++k) {
                const double err = std::abs(a[k] - b[k]);
                if (std::abs(b[k]) > 1e-8) {
                    worst_rel = std::max(worst_rel, err / std::abs(b[k]));
                    ok = ok && err / std::abs(b[k]) <= 1e-3;
                } else {
                    worst_abs = std::max(worst_abs, err);
                    ok = ok && err <= 1e-6;
                }
            }
        };
        compare(adj.grad_sigma1, fd.grad_sigma1);
        compare(adj.grad_sigma2, fd.grad_sigma2);
        compare(adj.grad_theta, fd.grad_theta);
    }
    detail = "worst relative " + num(worst_rel) + " (<= 1e-3), worst absolute " +
             num(worst_abs) + " (<= 1e-6) over 20 random points";
    return ok;
}

// --- 2. equilibrium preservation --------------------------------------------
bool equilibrium(std::string& detail) {
    PipelineConfig cfg = fixtures::pipeline();
    cfg.f = 0.0;
    DiscretizationConfig disc = fixtures::resolution(18, 10, 100, 0.01);
    ControlParams frozen;
    frozen.sigma1.assign(disc.r, 0.0);
    frozen.sigma2.assign(disc.r, cfg.u_max);
    frozen.theta.assign(disc.r, cfg.T / disc.r);

    StateTrajectory st = simulate(cfg, disc, frozen);
    double worst = 0.0;
    for (int j = 0; j < st.p.cols; ++j)
        for (int i = 0; i <= disc.N; ++i)
            worst = std::max(worst, std::abs(st.p(i, j) - cfg.P));
    detail = "max |p - P| = " + num(worst) + " Pa (<= " + num(1e-8 * cfg.P_bar) + ")";
    return worst <= 1e-8 * cfg.P_bar;
}

// --- 3. constant-closure reference value ------------------------------------
bool constant_closure(std::string& detail) {
    PipelineConfig cfg = fixtures::pipeline();
    DiscretizationConfig disc = fixtures::resolution(18, 10, 100, 0.01);
    ControlParams ramp = initial_guess(cfg, disc);
    StateTrajectory st = simulate(cfg, disc, ramp);
    const double J = objective(cfg, disc, ramp, st);
    detail = "J = " + num(J) + ", reference value 0.4144 +- 15%";
    return std::abs(J - 0.4144) <= 0.15 * 0.4144;
}

// --- 4. optimization dominance ----------------------------------------------
bool dominance(std::string& detail) {
    PipelineConfig cfg = fixtures::pipeline();
    DiscretizationConfig disc = fixtures::resolution(18, 10, 100, 0.01);
    ControlParams init = initial_guess(cfg, disc);
    StateTrajectory st = simulate(cfg, disc, init);
    const double j_const = objective(cfg, disc, init, st);

    OptimResult ts = optimize(cfg, disc, init, OptimOptions{});
    OptimResult fixed = optimize_fixed_grid(cfg, disc, init, OptimOptions{});
    detail = "J_ts = " + num(ts.J) + " (" + to_string(ts.status) + "), J_fixed = " +
             num(fixed.J) + " (" + to_string(fixed.status) + "), J_const = " +
             num(j_const);
    return ts.status == OptimStatus::converged &&
           fixed.status == OptimStatus::converged && ts.J <= fixed.J + 1e-6 &&
           fixed.J <= j_const + 1e-6 && ts.J <= 0.17 && fixed.J <= 0.22;
}

// --- 5. time-scaling exactness ----------------------------------------------
bool scaling_exactness(std::string& detail) {
    PipelineConfig cfg = fixtures::pipeline();
    DiscretizationConfig disc = fixtures::resolution(10, 5, 40);
    std::mt19937 rng(404);
    ControlParams p = fixtures::random_feasible(rng, cfg, disc.r);

    StateTrajectory scaled = simulate(cfg, disc, p);
    std::vector<double> nodes(scaled.s_grid.size());
    for (std::size_t j = 0; j < nodes.size(); ++j)
        nodes[j] = time_map(scaled.s_grid[j], p.theta);
    PhysicalTrajectory phys = simulate_physical_at(
        cfg, disc.N, nodes, [&](double t) { return control_value_physical(t, p); });

    double worst = 0.0;
    for (int j = 0; j < scaled.p.cols; ++j)
        for (int i = 0; i <= disc.N; ++i) {
            worst = std::max(worst, std::abs(scaled.p(i, j) - phys.p(i, j)) /
                                        std::max(std::abs(phys.p(i, j)), cfg.P_bar));
            worst = std::max(worst, std::abs(scaled.v(i, j) - phys.v(i, j)) /
                                        std::max(std::abs(phys.v(i, j)), cfg.u_max));
        }
    detail = "worst matched-sample relative difference = " + num(worst) + " (<= 1e-6)";
    return worst <= 1e-6;
}

// --- 6. convergence orders --------------------------------------------------
bool convergence_orders(std::string& detail) {
    // Time integration: frictionless closure over a short horizon so every
    // resolution stays below the Courant margin and the step truly halves.
    PipelineConfig cfg = fixtures::pipeline();
    cfg.f = 0.0;
    cfg.T = 0.5;
    auto final_slice = [&](int M) {
        DiscretizationConfig disc = fixtures::resolution(10, 2, M, 1e-4);
        ControlParams ramp;
        ramp.sigma1.assign(2, -cfg.u_max / cfg.T);
        ramp.sigma2.assign(2, cfg.u_max);
        ramp.theta.assign(2, cfg.T / 2);
        StateTrajectory st = simulate(cfg, disc, ramp);
        std::vector<double> out;
        const int last = st.p.cols - 1;
        for (int i = 0; i <= disc.N; ++i) {
            out.push_back(st.p(i, last));
            out.push_back(cfg.P_bar / cfg.u_max * st.v(i, last));
        }
        return out;
    };
    const std::vector<double> ref = final_slice(2560);
    auto err = [&](int M) {
        const std::vector<double> got = final_slice(M);
        double e = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i)
            e = std::max(e, std::abs(got[i] - ref[i]));
        return e;
    };
    const double rk_ratio_a = err(160) / err(320);
    const double rk_ratio_b = err(320) / err(640);

    // Quadrature: manufactured smooth integrand on [0, 2].
    auto integral = [](int m) {
        std::vector<double> y(m + 1);
        const double h = 2.0 / m;
        for (int i = 0; i <= m; ++i) y[i] = std::exp(i * h);
        return simpson(y, h);
    };
    const double exact = std::exp(2.0) - 1.0;
    const double simpson_ratio =
        std::abs(integral(8) - exact) / std::abs(integral(16) - exact);

    detail = "RK4 ratios " + num(rk_ratio_a) + ", " + num(rk_ratio_b) +
             "; Simpson ratio " + num(simpson_ratio) + " (all in [12, 20])";
    auto in_band = [](double x) { return x >= 12.0 && x <= 20.0; };
    return in_band(rk_ratio_a) && in_band(rk_ratio_b) && in_band(simpson_ratio);
}

// --- 7. published parameter residuals ---------------------------------------
bool reference_residuals(std::string& detail) {
    PipelineConfig cfg = fixtures::pipeline();
    ConstraintResiduals res = constraint_residuals(fixtures::reference_params(), cfg);
    detail = "|terminal| = " + num(std::abs(res.terminal)) +
             " (<= 5e-3), |continuity_1| = " + num(std::abs(res.continuity[0])) +
             " (<= 1e-3)";
    return std::abs(res.terminal) <= 5e-3 && std::abs(res.continuity[0]) <= 1e-3;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "gradient fidelity vs finite differences", false, gradient_fidelity},
        {2, "equilibrium preservation", false, equilibrium},
        {3, "constant-closure reference objective", true, constant_closure},
        {4, "optimization dominance", false, dominance},
        {5, "time-scaling exactness", false, scaling_exactness},
        {6, "convergence orders", false, convergence_orders},
        {7, "published parameter residuals", false, reference_residuals},
    };

    int hard_failures = 0;
    for (const Criterion& c : criteria) {
        bool ok = false;
        std::string detail;
        try {
            ok = c.check(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const char* verdict = ok ? "PASS" : "FAIL";
        std::string note;
        if (!ok && c.expected_divergence)
            note = " [documented divergence, not a build failure]";
        else if (!ok)
            ++hard_failures;
        std::printf("%s criterion %d (%s): %s%s\n", verdict, c.id, c.name.c_str(),
                    detail.c_str(), note.c_str());
    }
    return hard_failures;
}
