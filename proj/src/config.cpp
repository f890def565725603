#include "hammerflow/config.hpp"

#include "hammerflow/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hammerflow {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Parses "key = value" lines, '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        auto b = s.find_first_not_of(ws);
        auto e = s.find_last_not_of(ws);
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        require(eq != std::string::npos,
                "line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        require(!key.empty() && !val.empty(),
                "line " + std::to_string(lineno) + ": empty key or value");
        require(!kv.count(key), "duplicate key '" + key + "'");
        kv[key] = val;
    }
    return kv;
}

double to_number(const std::string& key, const std::string& val) {
    try {
        std::size_t pos = 0;
        double x = std::stod(val, &pos);
        if (pos != val.size()) throw std::invalid_argument(val);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("non-numeric value for key '" + key + "': '" + val + "'");
    }
}

int to_int(const std::string& key, const std::string& val) {
    double x = to_number(key, val);
    if (x != std::floor(x))
        throw ConfigError("key '" + key + "' must be an integer, got '" + val + "'");
    return static_cast<int>(x);
}

} // namespace

void PipelineConfig::validate() const {
    require(L > 0, "L must be positive");
    require(D > 0, "D must be positive");
    require(rho > 0, "rho must be positive");
    require(c > 0, "c must be positive");
    require(f >= 0, "f must be nonnegative");
    require(P_bar > 0, "P_bar must be positive");
    require(gamma >= 1, "gamma must be an integer >= 1");
    require(u_max > 0, "u_max must be positive");
    require(T > 0, "T must be positive");
    require(std::isfinite(P), "P must be finite");
}

void DiscretizationConfig::validate() const {
    require(N >= 2, "N must be >= 2");
    require(N % 2 == 0, "N must be even");
    require(r >= 1, "r must be >= 1");
    require(M >= 2, "M must be >= 2");
    require(M % 2 == 0, "M must be even");
    require(theta_min > 0, "theta_min must be positive");
}

std::pair<PipelineConfig, DiscretizationConfig> parse_config(const std::string& text) {
    static const std::set<std::string> known = {"L",     "D", "rho", "c", "f",
                                                "P",     "P_bar", "gamma", "u_max", "T",
                                                "N",     "r", "M", "theta_min"};
    auto kv = parse_kv(text);
    for (const auto& [key, _] : kv)
        require(known.count(key) != 0, "unknown key '" + key + "'");
    for (const auto& key : known)
        require(kv.count(key) != 0, "missing key '" + key + "'");

    PipelineConfig cfg;
    cfg.L = to_number("L", kv["L"]);
    cfg.D = to_number("D", kv["D"]);
    cfg.rho = to_number("rho", kv["rho"]);
    cfg.c = to_number("c", kv["c"]);
    cfg.f = to_number("f", kv["f"]);
    cfg.P = to_number("P", kv["P"]);
    cfg.P_bar = to_number("P_bar", kv["P_bar"]);
    cfg.gamma = to_int("gamma", kv["gamma"]);
    cfg.u_max = to_number("u_max", kv["u_max"]);
    cfg.T = to_number("T", kv["T"]);
    cfg.validate();

    DiscretizationConfig disc;
    disc.N = to_int("N", kv["N"]);
    disc.r = to_int("r", kv["r"]);
    disc.M = to_int("M", kv["M"]);
    disc.theta_min = to_number("theta_min", kv["theta_min"]);
    disc.validate();
    return {cfg, disc};
}

std::pair<PipelineConfig, DiscretizationConfig> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const PipelineConfig& cfg, const DiscretizationConfig& disc) {
    std::ostringstream out;
    out << "L = " << fmt17(cfg.L) << "\n"
        << "D = " << fmt17(cfg.D) << "\n"
        << "rho = " << fmt17(cfg.rho) << "\n"
        << "c = " << fmt17(cfg.c) << "\n"
        << "f = " << fmt17(cfg.f) << "\n"
        << "P = " << fmt17(cfg.P) << "\n"
        << "P_bar = " << fmt17(cfg.P_bar) << "\n"
        << "gamma = " << cfg.gamma << "\n"
        << "u_max = " << fmt17(cfg.u_max) << "\n"
        << "T = " << fmt17(cfg.T) << "\n"
        << "N = " << disc.N << "\n"
        << "r = " << disc.r << "\n"
        << "M = " << disc.M << "\n"
        << "theta_min = " << fmt17(disc.theta_min) << "\n";
    return out.str();
}

void validate_params(const ControlParams& params, const DiscretizationConfig& disc) {
    const std::size_t r = static_cast<std::size_t>(disc.r);
    require(params.sigma1.size() == r,
            "sigma1 has " + std::to_string(params.sigma1.size()) + " entries, expected " +
                std::to_string(r));
    require(params.sigma2.size() == r,
            "sigma2 has " + std::to_string(params.sigma2.size()) + " entries, expected " +
                std::to_string(r));
    require(params.theta.size() == r,
            "theta has " + std::to_string(params.theta.size()) + " entries, expected " +
                std::to_string(r));
    for (std::size_t k = 0; k < r; ++k) {
        require(std::isfinite(params.sigma1[k]) && std::isfinite(params.sigma2[k]),
                "non-finite sigma at segment " + std::to_string(k + 1));
        require(params.theta[k] >= disc.theta_min,
                "theta_" + std::to_string(k + 1) + " = " + fmt17(params.theta[k]) +
                    " is below theta_min = " + fmt17(disc.theta_min));
    }
}

ControlParams load_params(const std::string& path, int r) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open params file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto kv = parse_kv(buf.str());

    ControlParams p;
    p.sigma1.resize(r);
    p.sigma2.resize(r);
    p.theta.resize(r);
    for (int k = 1; k <= r; ++k) {
        for (auto [prefix, vec] : {std::pair{std::string("sigma1_"), &p.sigma1},
                                   {std::string("sigma2_"), &p.sigma2},
                                   {std::string("theta_"), &p.theta}}) {
            std::string key = prefix + std::to_string(k);
            require(kv.count(key) != 0, "missing key '" + key + "'");
            (*vec)[k - 1] = to_number(key, kv[key]);
            kv.erase(key);
        }
    }
    for (const auto& [key, _] : kv) throw ConfigError("unknown key '" + key + "'");
    return p;
}

std::string serialize_params(const ControlParams& params) {
    std::ostringstream out;
    for (std::size_t k = 0; k < params.segments(); ++k) {
        out << "sigma1_" << k + 1 << " = " << fmt17(params.sigma1[k]) << "\n"
            << "sigma2_" << k + 1 << " = " << fmt17(params.sigma2[k]) << "\n"
            << "theta_" << k + 1 << " = " << fmt17(params.theta[k]) << "\n";
    }
    return out.str();
}

double default_theta_min(double T, int r) { return 0.01 * T / r; }

} // namespace hammerflow
