#pragma once

#include <string>
#include <vector>

namespace hammerflow {

/// Physical constants of the pipe and fluid. All SI units; immutable once
/// constructed through load_config / validate.
struct PipelineConfig {
    double L = 0.0;      ///< pipe length [m]
    double D = 0.0;      ///< diameter [m]
    double rho = 0.0;    ///< fluid density [kg/m^3]
    double c = 0.0;      ///< pressure wave speed [m/s]
    double f = 0.0;      ///< Darcy-Weisbach friction factor [-]
    double P = 0.0;      ///< reservoir pressure [Pa]
    double P_bar = 0.0;  ///< pressure datum [Pa]
    int gamma = 1;       ///< even-power exponent in the objective, >= 1
    double u_max = 0.0;  ///< initial / maximum boundary velocity [m/s]
    double T = 0.0;      ///< total valve-closure horizon [s]

    /// Throws ConfigError naming the offending field on any invariant violation.
    void validate() const;
};

/// Numerical resolution knobs shared by solver, quadrature and optimizer.
struct DiscretizationConfig {
    int N = 0;               ///< spatial cell count, even, >= 2
    int r = 0;               ///< number of control segments, >= 1
    int M = 0;               ///< subintervals per unit of scaled time, even, >= 2
    double theta_min = 0.0;  ///< lower bound on each segment duration [s]

    void validate() const;
};

/// Decision vector: slope, intercept and duration per control segment.
struct ControlParams {
    std::vector<double> sigma1;  ///< slopes [m/s per s]
    std::vector<double> sigma2;  ///< intercepts [m/s]
    std::vector<double> theta;   ///< segment durations [s]

    std::size_t segments() const { return theta.size(); }
};

/// Parses the flat key = value config format. Unknown keys are an error.
std::pair<PipelineConfig, DiscretizationConfig> load_config(const std::string& path);
std::pair<PipelineConfig, DiscretizationConfig> parse_config(const std::string& text);

/// Inverse of parse_config; round-trips bit-exactly (17 significant digits).
std::string serialize_config(const PipelineConfig& cfg, const DiscretizationConfig& disc);

/// Checks ControlParams dimensions against r and the theta_min floor.
void validate_params(const ControlParams& params, const DiscretizationConfig& disc);

/// Params file I/O: sigma1_1 = ..., sigma2_1 = ..., theta_1 = ... style.
ControlParams load_params(const std::string& path, int r);
std::string serialize_params(const ControlParams& params);

/// Default duration floor when the config does not override it: 0.01 * T / r.
double default_theta_min(double T, int r);

} // namespace hammerflow
