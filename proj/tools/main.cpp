// hammerflow command-line front end: simulate / optimize / gradcheck / compare.
#include "hammerflow/errors.hpp"
#include "hammerflow/forward_solver.hpp"
#include "hammerflow/objective.hpp"
#include "hammerflow/optimizer.hpp"
#include "hammerflow/time_scaling.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hammerflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerics = 2;
constexpr int kExitOptimizer = 3;
constexpr int kExitGradcheck = 4;

struct Manifest {
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::string params_path;
    bool ramp = false;
    bool fixed_grid = false;
    bool force = false;
    bool perturb_gradient = false;
    int max_iters = -1;  // -1 keeps the library default
    std::vector<std::string> overrides;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void apply_override(PipelineConfig& cfg, DiscretizationConfig& disc,
                    const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(val, &used);
    } catch (const std::exception&) {
        throw ConfigError("--set " + key + ": non-numeric value '" + val + "'");
    }
    if (used != val.size())
        throw ConfigError("--set " + key + ": non-numeric value '" + val + "'");
    auto as_int = [&] {
        if (x != std::floor(x))
            throw ConfigError("--set " + key + ": expected an integer, got '" + val + "'");
        return static_cast<int>(x);
    };
    if (key == "L") cfg.L = x;
    else if (key == "D") cfg.D = x;
    else if (key == "rho") cfg.rho = x;
    else if (key == "c") cfg.c = x;
    else if (key == "f") cfg.f = x;
    else if (key == "P") cfg.P = x;
    else if (key == "P_bar") cfg.P_bar = x;
    else if (key == "gamma") cfg.gamma = as_int();
    else if (key == "u_max") cfg.u_max = x;
    else if (key == "T") cfg.T = x;
    else if (key == "N") disc.N = as_int();
    else if (key == "r") disc.r = as_int();
    else if (key == "M") disc.M = as_int();
    else if (key == "theta_min") disc.theta_min = x;
    else throw ConfigError("--set: unknown config key '" + key + "'");
}

std::pair<PipelineConfig, DiscretizationConfig> load(const Manifest& m) {
    auto [cfg, disc] = load_config(m.config_path);
    for (const auto& item : m.overrides) apply_override(cfg, disc, item);
    cfg.validate();
    disc.validate();
    return {cfg, disc};
}

void prepare_out_dir(const Manifest& m, const std::vector<std::string>& artifacts) {
    fs::create_directories(m.out_dir);
    if (m.force) return;
    for (const auto& name : artifacts) {
        const fs::path p = fs::path(m.out_dir) / name;
        if (fs::exists(p))
            throw ConfigError("refusing to overwrite " + p.string() +
                              " (pass --force to allow)");
    }
}

std::string artifact(const Manifest& m, const std::string& name) {
    return (fs::path(m.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

/// Control at start, either from a params file or the exact linear ramp.
ControlParams pick_params(const Manifest& m, const PipelineConfig& cfg,
                          const DiscretizationConfig& disc, bool require_flag) {
    if (!m.params_path.empty()) {
        ControlParams p = load_params(m.params_path, disc.r);
        validate_params(p, disc);
        return p;
    }
    if (m.ramp || !require_flag) return initial_guess(cfg, disc);
    throw ConfigError("simulate needs --params <file> or --ramp");
}

void write_terminal_pressure_csv(const std::string& path, const StateTrajectory& st,
                                 int N) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "t,p\n";
    for (std::size_t j = 0; j < st.s_grid.size(); ++j)
        out << fmt(time_map(st.s_grid[j], st.params_used.theta)) << ','
            << fmt(st.p(N, static_cast<int>(j))) << '\n';
}

double max_overshoot(const StateTrajectory& st, const PipelineConfig& cfg, int N,
                     int cols) {
    double worst = 0.0;
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j < cols; ++j)
            worst = std::max(worst, (st.p(i, j) - cfg.P) / cfg.P_bar);
    return worst;
}

void write_control_curve_csv(const std::string& path, const StateTrajectory& st) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "t,u\n";
    for (double s : st.s_grid)
        out << fmt(time_map(s, st.params_used.theta)) << ','
            << fmt(control_value(s, st.params_used)) << '\n';
}

json residuals_json(const ConstraintResiduals& res) {
    return {{"continuity", res.continuity},
            {"initial", res.initial},
            {"terminal", res.terminal},
            {"total_time", res.total_time}};
}

int cmd_simulate(const Manifest& m) {
    auto [cfg, disc] = load(m);
    prepare_out_dir(m, {"state.csv", "terminal_pressure.csv", "summary.json"});
    const ControlParams params = pick_params(m, cfg, disc, /*require_flag=*/true);

    StateTrajectory st = simulate(cfg, disc, params);
    const double J = objective(cfg, disc, params, st);

    export_state_csv(st, cfg, artifact(m, "state.csv"));
    write_terminal_pressure_csv(artifact(m, "terminal_pressure.csv"), st, disc.N);
    json summary = {{"J", J},
                    {"max_overshoot", max_overshoot(st, cfg, disc.N, disc.r * disc.M + 1)}};
    write_text(artifact(m, "summary.json"), summary.dump(2) + "\n");
    return kExitOk;
}

int cmd_optimize(const Manifest& m) {
    auto [cfg, disc] = load(m);
    prepare_out_dir(m, {"optimal_params.txt", "history.csv", "state.csv",
                        "control_curve.csv"});
    const ControlParams init = pick_params(m, cfg, disc, /*require_flag=*/false);

    OptimOptions opts;
    if (m.max_iters >= 0) opts.max_iters = m.max_iters;
    const OptimResult res = m.fixed_grid ? optimize_fixed_grid(cfg, disc, init, opts)
                                         : optimize(cfg, disc, init, opts);

    write_text(artifact(m, "optimal_params.txt"), serialize_params(res.params));
    export_history_csv(res, artifact(m, "history.csv"));
    StateTrajectory st = simulate(cfg, disc, res.params);
    export_state_csv(st, cfg, artifact(m, "state.csv"));
    write_control_curve_csv(artifact(m, "control_curve.csv"), st);
    return res.status == OptimStatus::line_search_failure ? kExitOptimizer : kExitOk;
}

int cmd_gradcheck(const Manifest& m) {
    auto [cfg, disc] = load(m);
    prepare_out_dir(m, {"gradcheck.json"});
    const ControlParams params = pick_params(m, cfg, disc, /*require_flag=*/false);

    GradientBundle adj = evaluate(cfg, disc, params);
    const GradientBundle fd = fd_gradient(cfg, disc, params, 1e-5);
    if (m.perturb_gradient && !adj.grad_sigma1.empty())
        adj.grad_sigma1[0] += 1.0 + std::abs(adj.grad_sigma1[0]);

    bool all_pass = true;
    json components = json::array();
    auto check = [&](const char* name, const std::vector<double>& a,
                     const std::vector<double>& f) {
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double err = std::abs(a[k] - f[k]);
            const bool relative = std::abs(f[k]) > 1e-8;
            const double measure = relative ? err / std::abs(f[k]) : err;
            const bool pass = measure <= (relative ? 1e-3 : 1e-6);
            all_pass = all_pass && pass;
            components.push_back({{"name", std::string(name) + "_" + std::to_string(k + 1)},
                                  {"adjoint", a[k]},
                                  {"fd", f[k]},
                                  {"mode", relative ? "relative" : "absolute"},
                                  {"error", measure},
                                  {"pass", pass}});
        }
    };
    check("sigma1", adj.grad_sigma1, fd.grad_sigma1);
    check("sigma2", adj.grad_sigma2, fd.grad_sigma2);
    check("theta", adj.grad_theta, fd.grad_theta);

    json report = {{"J", adj.J},
                   {"grad_sigma1", adj.grad_sigma1},
                   {"grad_sigma2", adj.grad_sigma2},
                   {"grad_theta", adj.grad_theta},
                   {"residuals", residuals_json(adj.residuals)},
                   {"components", components},
                   {"pass", all_pass}};
    write_text(artifact(m, "gradcheck.json"), report.dump(2) + "\n");
    return all_pass ? kExitOk : kExitGradcheck;
}

int cmd_compare(const Manifest& m) {
    auto [cfg, disc] = load(m);
    prepare_out_dir(m, {"compare.json", "compare_controls.csv",
                        "compare_terminal_pressure.csv"});
    const ControlParams base = initial_guess(cfg, disc);

    StateTrajectory st_const = simulate(cfg, disc, base);
    const double j_const = objective(cfg, disc, base, st_const);

    OptimOptions opts;
    if (m.max_iters >= 0) opts.max_iters = m.max_iters;
    const OptimResult fixed = optimize_fixed_grid(cfg, disc, base, opts);
    const OptimResult scaled = optimize(cfg, disc, base, opts);

    json report = {{"J_constant", j_const},
                   {"J_fixed_grid", fixed.J},
                   {"J_time_scaled", scaled.J},
                   {"status_fixed_grid", to_string(fixed.status)},
                   {"status_time_scaled", to_string(scaled.status)}};
    write_text(artifact(m, "compare.json"), report.dump(2) + "\n");

    // Shared uniform physical-time grid for the plot data.
    const int nt = disc.r * disc.M;
    std::vector<double> t_grid(nt + 1);
    for (int j = 0; j <= nt; ++j) t_grid[j] = cfg.T * j / nt;
    auto control_of = [](const ControlParams& p) {
        const double horizon = std::accumulate(p.theta.begin(), p.theta.end(), 0.0);
        return [p, horizon](double t) {
            return control_value_physical(std::min(t, horizon), p);
        };
    };
    const auto u_const = control_of(base);
    const auto u_fixed = control_of(fixed.params);
    const auto u_scaled = control_of(scaled.params);

    {
        std::ofstream out(artifact(m, "compare_controls.csv"));
        if (!out) throw ConfigError("cannot write compare_controls.csv");
        out << "t,u_constant,u_fixed_grid,u_time_scaled\n";
        for (double t : t_grid)
            out << fmt(t) << ',' << fmt(u_const(t)) << ',' << fmt(u_fixed(t)) << ','
                << fmt(u_scaled(t)) << '\n';
    }

    PhysicalTrajectory ph_const = simulate_physical_at(cfg, disc.N, t_grid, u_const);
    PhysicalTrajectory ph_fixed = simulate_physical_at(cfg, disc.N, t_grid, u_fixed);
    PhysicalTrajectory ph_scaled = simulate_physical_at(cfg, disc.N, t_grid, u_scaled);
    {
        std::ofstream out(artifact(m, "compare_terminal_pressure.csv"));
        if (!out) throw ConfigError("cannot write compare_terminal_pressure.csv");
        out << "t,p_constant,p_fixed_grid,p_time_scaled\n";
        for (int j = 0; j <= nt; ++j)
            out << fmt(t_grid[j]) << ',' << fmt(ph_const.p(disc.N, j)) << ','
                << fmt(ph_fixed.p(disc.N, j)) << ',' << fmt(ph_scaled.p(disc.N, j))
                << '\n';
    }

    if (fixed.status == OptimStatus::line_search_failure ||
        scaled.status == OptimStatus::line_search_failure)
        return kExitOptimizer;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Water-hammer valve-closure scheduling"};
    app.require_subcommand(1);

    Manifest m;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", m.config_path, "config file (key = value)")
            ->required();
        sub->add_option("--out-dir", m.out_dir, "artifact directory");
        sub->add_option("--set", m.overrides, "override a config key, key=value");
        sub->add_flag("--force", m.force, "overwrite existing artifacts");
        return sub;
    };

    CLI::App* sim = add_common(app.add_subcommand("simulate", "run one forward solve"));
    sim->add_option("--params", m.params_path, "control parameter file");
    sim->add_flag("--ramp", m.ramp, "use the exact linear closure ramp");

    CLI::App* opt = add_common(app.add_subcommand("optimize", "solve for the optimal schedule"));
    opt->add_option("--params", m.params_path, "initial control parameter file");
    opt->add_flag("--ramp", m.ramp, "start from the exact linear ramp (default)");
    opt->add_flag("--fixed-grid", m.fixed_grid, "freeze the segment durations");
    opt->add_option("--max-iters", m.max_iters, "iteration cap");

    CLI::App* grd = add_common(app.add_subcommand("gradcheck", "adjoint vs finite differences"));
    grd->add_option("--params", m.params_path, "check point (default: linear ramp)");
    grd->add_flag("--perturb-gradient", m.perturb_gradient)->group("");  // negative control

    CLI::App* cmp = add_common(app.add_subcommand("compare", "baseline vs fixed-grid vs time-scaled"));
    cmp->add_option("--max-iters", m.max_iters, "iteration cap for both optimizations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(m);
        if (opt->parsed()) return cmd_optimize(m);
        if (grd->parsed()) return cmd_gradcheck(m);
        return cmd_compare(m);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const NumericsError& e) {
        std::fprintf(stderr, "numerics error: %s\n", e.what());
        return kExitNumerics;
    } catch (const GridMismatchError& e) {
        std::fprintf(stderr, "grid mismatch: %s\n", e.what());
        return kExitNumerics;
    } catch (const OptimError& e) {
        std::fprintf(stderr, "optimizer error: %s\n", e.what());
        return kExitOptimizer;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
}
