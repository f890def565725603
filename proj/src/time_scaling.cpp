#include "hammerflow/time_scaling.hpp"

#include "hammerflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hammerflow {

double ConstraintResiduals::max_scaled(double u_max, double T) const {
    double m = std::max(std::abs(initial), std::abs(terminal)) / u_max;
    for (double cres : continuity) m = std::max(m, std::abs(cres) / u_max);
    m = std::max(m, std::abs(total_time) / T);
    return m;
}

int segment_index(double s, int r) {
    if (s < 0.0 || s > static_cast<double>(r))
        throw NumericsError("scaled time s = " + std::to_string(s) + " outside [0, " +
                            std::to_string(r) + "]");
    int k = static_cast<int>(std::floor(s));
    return std::min(k, r - 1);
}

double time_map(double s, std::span<const double> theta) {
    const int r = static_cast<int>(theta.size());
    const int k = segment_index(s, r);
    if (s == static_cast<double>(r))
        return std::accumulate(theta.begin(), theta.end(), 0.0);
    double t = 0.0;
    for (int m = 0; m < k; ++m) t += theta[m];
    return t + theta[k] * (s - static_cast<double>(k));
}

double inverse_time_map(double t, std::span<const double> theta) {
    const int r = static_cast<int>(theta.size());
    const double total = std::accumulate(theta.begin(), theta.end(), 0.0);
    if (t < 0.0 || t > total * (1.0 + 1e-12))
        throw NumericsError("physical time t = " + std::to_string(t) +
                            " outside [0, " + std::to_string(total) + "]");
    t = std::min(t, total);
    double acc = 0.0;
    for (int k = 0; k < r; ++k) {
        if (t <= acc + theta[k] || k == r - 1)
            return static_cast<double>(k) + (t - acc) / theta[k];
        acc += theta[k];
    }
    return static_cast<double>(r);
}

double control_value(double s, const ControlParams& params) {
    const int r = static_cast<int>(params.segments());
    const int k = segment_index(s, r);
    return params.sigma1[k] * time_map(s, params.theta) + params.sigma2[k];
}

double control_value_physical(double t, const ControlParams& params) {
    const int r = static_cast<int>(params.segments());
    double acc = 0.0;
    for (int k = 0; k < r; ++k) {
        double next = acc + params.theta[k];
        if (t < next || k == r - 1)
            return params.sigma1[k] * t + params.sigma2[k];
        acc = next;
    }
    return params.sigma1[r - 1] * t + params.sigma2[r - 1];
}

ConstraintResiduals constraint_residuals(const ControlParams& params,
                                         const PipelineConfig& cfg) {
    const std::size_t r = params.segments();
    ConstraintResiduals res;
    res.continuity.resize(r > 0 ? r - 1 : 0);
    double t_k = 0.0;
    for (std::size_t k = 0; k + 1 < r; ++k) {
        t_k += params.theta[k];
        res.continuity[k] = params.sigma1[k] * t_k + params.sigma2[k] -
                            params.sigma1[k + 1] * t_k - params.sigma2[k + 1];
    }
    res.initial = params.sigma2.front() - cfg.u_max;
    // Terminal compatibility is written against the fixed horizon T; it
    // coincides with sum(theta) only when the total-time constraint holds.
    res.terminal = params.sigma1.back() * cfg.T + params.sigma2.back();
    res.total_time =
        std::accumulate(params.theta.begin(), params.theta.end(), 0.0) - cfg.T;
    return res;
}

} // namespace hammerflow
