#include "hammerflow/config.hpp"
#include "hammerflow/errors.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"

using namespace hammerflow;

namespace {

std::string valid_text() {
    return "L = 100\nD = 0.1\nrho = 1000\nc = 1200\nf = 0.03\n"
           "P = 2e5\nP_bar = 1e5\ngamma = 2\nu_max = 2\nT = 10\n"
           "N = 18\nr = 10\nM = 100\ntheta_min = 0.01\n";
}

std::string with(const std::string& key, const std::string& value) {
    std::string out;
    for (std::size_t pos = 0, next; pos < valid_text().size(); pos = next + 1) {
        const std::string text = valid_text();
        next = text.find('\n', pos);
        std::string line = text.substr(pos, next - pos);
        if (line.rfind(key + " ", 0) == 0) line = key + " = " + value;
        out += line + "\n";
    }
    return out;
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path;
}

} // namespace

TEST_CASE("parse_config accepts the reference pipeline") {
    auto [cfg, disc] = parse_config(valid_text());
    CHECK(cfg.L == 100.0);
    CHECK(cfg.D == 0.1);
    CHECK(cfg.rho == 1000.0);
    CHECK(cfg.c == 1200.0);
    CHECK(cfg.f == 0.03);
    CHECK(cfg.P == 2e5);
    CHECK(cfg.P_bar == 1e5);
    CHECK(cfg.gamma == 2);
    CHECK(cfg.u_max == 2.0);
    CHECK(cfg.T == 10.0);
    CHECK(disc.N == 18);
    CHECK(disc.r == 10);
    CHECK(disc.M == 100);
    CHECK(disc.theta_min == 0.01);
}

TEST_CASE("parse_config rejects invalid fields with the key named") {
    CHECK_THROWS_WITH_AS(parse_config(with("N", "17")), doctest::Contains("N must be even"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(with("theta_min", "0")),
                         doctest::Contains("theta_min must be positive"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(with("rho", "abc")), doctest::Contains("rho"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(with("gamma", "1.5")), doctest::Contains("gamma"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(valid_text() + "bogus = 1\n"),
                         doctest::Contains("unknown key 'bogus'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(valid_text() + "L = 5\n"),
                         doctest::Contains("duplicate key 'L'"), ConfigError);
}

TEST_CASE("parse_config requires every key") {
    std::string text;  // drop theta_min
    const std::string all = valid_text();
    for (std::size_t pos = 0, next; pos < all.size(); pos = next + 1) {
        next = all.find('\n', pos);
        std::string line = all.substr(pos, next - pos);
        if (line.rfind("theta_min", 0) != 0) text += line + "\n";
    }
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("missing key 'theta_min'"),
                         ConfigError);
}

TEST_CASE("load_config reports a missing file with the path") {
    CHECK_THROWS_WITH_AS(load_config("/no/such/file.cfg"),
                         doctest::Contains("/no/such/file.cfg"), ConfigError);
}

TEST_CASE("config round-trips bit-exactly") {
    PipelineConfig cfg = fixtures::pipeline();
    cfg.f = 0.030000000000000002;
    cfg.c = 1199.9999999999998;
    DiscretizationConfig disc = fixtures::resolution(18, 10, 100, 0.012345678901234567);
    auto [cfg2, disc2] = parse_config(serialize_config(cfg, disc));
    CHECK(cfg2.f == cfg.f);
    CHECK(cfg2.c == cfg.c);
    CHECK(cfg2.P == cfg.P);
    CHECK(disc2.theta_min == disc.theta_min);
    CHECK(disc2.N == disc.N);
}

TEST_CASE("validate_params checks sizes and the duration floor") {
    DiscretizationConfig disc = fixtures::resolution(18, 10, 100, 0.01);
    ControlParams good = fixtures::reference_params();
    CHECK_NOTHROW(validate_params(good, disc));

    ControlParams low = good;
    low.theta[3] = 0.0;
    CHECK_THROWS_AS(validate_params(low, disc), ConfigError);

    ControlParams shape = good;
    shape.sigma1.resize(9);
    CHECK_THROWS_WITH_AS(validate_params(shape, disc), doctest::Contains("sigma1"),
                         ConfigError);
}

TEST_CASE("validate_params accepts exactly the invariant set") {
    DiscretizationConfig disc = fixtures::resolution(4, 6, 4, 0.05);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> any(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        ControlParams p;
        const int n = 5 + static_cast<int>(rng() % 3);  // 5..7 entries vs r=6
        for (int j = 0; j < n; ++j) {
            p.sigma1.push_back(any(rng));
            p.sigma2.push_back(any(rng));
            p.theta.push_back(any(rng));
        }
        bool ok = n == disc.r;
        for (double th : p.theta) ok = ok && th >= disc.theta_min;
        if (ok)
            CHECK_NOTHROW(validate_params(p, disc));
        else
            CHECK_THROWS_AS(validate_params(p, disc), ConfigError);
    }
}

TEST_CASE("params file round-trips through serialize and load") {
    ControlParams p = fixtures::reference_params();
    auto path = temp_file("hf_params_roundtrip.txt", serialize_params(p));
    ControlParams q = load_params(path.string(), 10);
    for (int k = 0; k < 10; ++k) {
        CHECK(q.sigma1[k] == p.sigma1[k]);
        CHECK(q.sigma2[k] == p.sigma2[k]);
        CHECK(q.theta[k] == p.theta[k]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("default theta floor is one percent of the mean duration") {
    CHECK(default_theta_min(10.0, 10) == doctest::Approx(0.01).epsilon(1e-12));
}
