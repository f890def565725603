#include "hammerflow/errors.hpp"
#include "hammerflow/optimizer.hpp"
#include "hammerflow/time_scaling.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"

using namespace hammerflow;

namespace {

// Small, fast problem used for the behavioural checks.
DiscretizationConfig small_disc() { return fixtures::resolution(10, 3, 20, 0.05); }

} // namespace

TEST_CASE("initial guess is the exact linear ramp") {
    PipelineConfig cfg = fixtures::pipeline();
    DiscretizationConfig disc = fixtures::resolution(18, 10, 100, 0.01);
    ControlParams p = initial_guess(cfg, disc);
    for (int k = 0; k < 10; ++k) {
        CHECK(p.theta[k] == 1.0);
        CHECK(p.sigma1[k] == -0.2);
        CHECK(p.sigma2[k] == 2.0);
    }
    ConstraintResiduals res = constraint_residuals(p, cfg);
    CHECK(res.max_scaled(cfg.u_max, cfg.T) == 0.0);
    CHECK(control_value(10.0, p) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("zero iteration budget returns the initial point") {
    PipelineConfig cfg = fixtures::pipeline();
    DiscretizationConfig disc = small_disc();
    OptimOptions opts;
    opts.max_iters = 0;
    OptimResult res = optimize(cfg, disc, initial_guess(cfg, disc), opts);
    CHECK(res.status == OptimStatus::max_iters);
    CHECK(res.history.size() == 1);
    for (int k = 0; k < 3; ++k) CHECK(res.params.sigma2[k] == 2.0);
}

TEST_CASE("single fixed segment has a unique feasible point") {
    PipelineConfig cfg = fixtures::pipeline();
    DiscretizationConfig disc = fixtures::resolution(10, 1, 40, 0.05);
    OptimResult res = optimize_fixed_grid(cfg, disc, initial_guess(cfg, disc),
                                          OptimOptions{});
    CHECK(res.params.sigma1[0] == doctest::Approx(-cfg.u_max / cfg.T).epsilon(1e-6));
    CHECK(res.params.sigma2[0] == cfg.u_max);
    CHECK(res.residual_max <= 1e-6);
}

TEST_CASE("an infeasible start is rejected before iterating") {
    PipelineConfig cfg = fixtures::pipeline();
    DiscretizationConfig disc = small_disc();
    ControlParams bad = initial_guess(cfg, disc);
    bad.sigma2[1] += 0.5;  // breaks continuity at the first knot
    CHECK_THROWS_AS((void)optimize(cfg, disc, bad, OptimOptions{}), OptimError);

    ControlParams pinned = initial_guess(cfg, disc);
    pinned.sigma2[0] = 1.5;  // violates u(0) = u_max
    CHECK_THROWS_AS((void)optimize(cfg, disc, pinned, OptimOptions{}), OptimError);
}

TEST_CASE("optimizer improves the ramp and ends feasible") {
    PipelineConfig cfg = fixtures::pipeline();
    DiscretizationConfig disc = small_disc();
    ControlParams init = initial_guess(cfg, disc);
    StateTrajectory st0 = simulate(cfg, disc, init);
    const double j0 = objective(cfg, disc, init, st0);

    OptimResult res = optimize(cfg, disc, init, OptimOptions{});
    CHECK(res.status == OptimStatus::converged);
    CHECK(res.J <= j0 + 1e-6);
    CHECK(res.residual_max <= 1e-6);
    CHECK(!res.history.empty());
    for (double th : res.params.theta) CHECK(th >= disc.theta_min);
    CHECK(res.params.sigma2[0] == cfg.u_max);  // pinned by elimination

    OptimResult fixed = optimize_fixed_grid(cfg, disc, init, OptimOptions{});
    CHECK(fixed.J >= res.J - 1e-6);
    for (int k = 0; k < 3; ++k)
        CHECK(fixed.params.theta[k] == init.theta[k]);  // grid untouched
}

TEST_CASE("the solve is deterministic") {
    PipelineConfig cfg = fixtures::pipeline();
    DiscretizationConfig disc = small_disc();
    OptimResult a = optimize(cfg, disc, initial_guess(cfg, disc), OptimOptions{});
    OptimResult b = optimize(cfg, disc, initial_guess(cfg, disc), OptimOptions{});
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].J == b.history[i].J);
        CHECK(a.history[i].residual_max == b.history[i].residual_max);
        CHECK(a.history[i].step == b.history[i].step);
    }
}

TEST_CASE("options are validated") {
    OptimOptions opts;
    opts.ls_c1 = 1.5;
    CHECK_THROWS_AS(opts.validate(), ConfigError);
    opts = OptimOptions{};
    opts.penalty_growth = 0.5;
    CHECK_THROWS_AS(opts.validate(), ConfigError);
    CHECK_NOTHROW(OptimOptions{}.validate());
}

TEST_CASE("history CSV export uses the documented header") {
    PipelineConfig cfg = fixtures::pipeline();
    DiscretizationConfig disc = small_disc();
    OptimOptions opts;
    opts.max_iters = 0;
    OptimResult res = optimize(cfg, disc, initial_guess(cfg, disc), opts);

    auto path = std::filesystem::temp_directory_path() / "hf_history_test.csv";
    export_history_csv(res, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "iter,J,residual_max,step");
    int lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == 1);
    std::filesystem::remove(path);
}
