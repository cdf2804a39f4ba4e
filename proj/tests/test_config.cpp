// Copyright 2026-present the mmc-tdgl project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include <cmath>
#include <limits>
#include <string>

#include "mmctdgl/config.hpp"
#include "mmctdgl/errors.hpp"

using namespace mmctdgl;
using sim::RunConfig;

namespace {

std::string error_text(const std::string& text) {
    try {
        cli::parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("empty text yields the defaults") {
    RunConfig def;
    CHECK(cli::parse_config_text("") == def);
    CHECK(cli::parse_config_text("# only a comment\n\n   \n") == def);
}

TEST_CASE("comments, blank lines and spacing are tolerated") {
    auto c = cli::parse_config_text(
        "# header\n"
        "nx = 32   # trailing comment\n"
        "\tny=16\n"
        "   lx   =    2.5\n");
    CHECK(c.nx == 32);
    CHECK(c.ny == 16);
    CHECK(c.lx == 2.5);
}

TEST_CASE("full round trip through print and parse") {
    RunConfig c;
    c.nx = 48;
    c.ny = 40;
    c.lx = 5.5;
    c.ly = 4.25;
    c.params.m0 = 0.3;
    c.params.chi = 0.45;
    c.params.tau = 2e7;
    c.params.ncoef = 900.0;
    c.params.rho = 1.25;
    c.params.temp = 2.0;
    c.params.kcoef = 0.75;
    c.params.alpha = 1.5;
    c.params.beta = 2.5;
    c.scheme = schemes::SchemeKind::Nonlinear;
    c.control.mode = stepper::StepMode::Adaptive;
    c.control.dt = 0.002;
    c.control.dt_min = 0.0005;
    c.control.dt_max = 0.2;
    c.control.mu = 1500.0;
    c.control.lambda_table = {{50.0, 1.0}, {150.0, 2.0},
                              {std::numeric_limits<double>::infinity(), 3.0}};
    c.control.uprime_window = 4;
    c.mu_rescale_t2 = true;
    c.t_end = 2.5;
    c.seed = 99;
    c.init_mean = 0.5;
    c.init_amp = 0.02;
    c.snapshot_times = {0.5, 1.0, 2.5};
    c.cg_tol = 1e-8;
    c.cg_tol_absolute = true;
    c.cg_maxit = 5000;
    c.newton_tol = 1e-9;
    c.newton_maxit = 30;
    c.fd_eps = 1e-7;
    c.band_margin = 0.001;
    c.band_policy = sim::BandPolicy::Clamp;
    c.assert_stability = false;
    c.bench_ref_dt = 5e-4;
    c.bench_policies = {"0.01", "adaptive"};
    c.bench_times = {0.5, 1.0};

    const std::string text = cli::print_config(c);
    auto back = cli::parse_config_text(text);
    CHECK(back == c);
    // Printing is a fixed point.
    CHECK(cli::print_config(back) == text);
}

TEST_CASE("defaults round trip too") {
    RunConfig def;
    CHECK(cli::parse_config_text(cli::print_config(def)) == def);
}

TEST_CASE("line numbers in parse errors") {
    const std::string unknown = error_text("nx = 8\n\nfrobnicate = 1\n");
    CHECK(unknown.find("line 3") != std::string::npos);
    CHECK(unknown.find("frobnicate") != std::string::npos);

    const std::string dup = error_text("nx = 8\nnx = 9\n");
    CHECK(dup.find("line 2") != std::string::npos);
    CHECK(dup.find("duplicate") != std::string::npos);

    const std::string noeq = error_text("nx 8\n");
    CHECK(noeq.find("line 1") != std::string::npos);
    CHECK(noeq.find("key = value") != std::string::npos);
}

TEST_CASE("typed value errors") {
    CHECK(error_text("lx = banana\n").find("not a number") != std::string::npos);
    CHECK(error_text("nx = 8.5\n").find("not an integer") != std::string::npos);
    CHECK(error_text("seed = -4\n").find("unsigned") != std::string::npos);
    CHECK(error_text("assert_stability = yes\n").find("'true' or 'false'") != std::string::npos);
    CHECK(error_text("scheme = upwind\n").find("'linear' or 'nonlinear'") != std::string::npos);
    CHECK(error_text("step_mode = auto\n").find("'constant' or 'adaptive'") != std::string::npos);
    CHECK(error_text("cg_tol_mode = loose\n").find("'relative' or 'absolute'") != std::string::npos);
    CHECK(error_text("band_policy = ignore\n").find("'strict' or 'clamp'") != std::string::npos);
    CHECK(error_text("snapshot_times = 0.1, nope\n").find("not a number") != std::string::npos);
    CHECK(error_text("lambda_table = 100:1, broken\n").find("bound:factor") != std::string::npos);
}

TEST_CASE("schedule parsing accepts inf and keeps order") {
    auto c = cli::parse_config_text("lambda_table = 10:1, 20:1.5, inf:4\n");
    REQUIRE(c.control.lambda_table.size() == 3);
    CHECK(c.control.lambda_table[0] == std::pair{10.0, 1.0});
    CHECK(c.control.lambda_table[1] == std::pair{20.0, 1.5});
    CHECK(std::isinf(c.control.lambda_table[2].first));
    CHECK(c.control.lambda_table[2].second == 4.0);
}

TEST_CASE("snapshot times are sorted and deduplicated") {
    auto c = cli::parse_config_text("snapshot_times = 0.9, 0.1, 0.5, 0.1\n");
    CHECK(c.snapshot_times == std::vector<double>{0.1, 0.5, 0.9});
    auto b = cli::parse_config_text("bench_times = 2, 1, 1\n");
    CHECK(b.bench_times == std::vector<double>{1.0, 2.0});
}

TEST_CASE("invariant violations are collected into one report") {
    const std::string msg = error_text("nx = 2\nt_end = -1\ncg_tol = 0\ninit_amp = -0.5\n");
    CHECK(msg.find("nx and ny") != std::string::npos);
    CHECK(msg.find("t_end") != std::string::npos);
    CHECK(msg.find("cg_tol") != std::string::npos);
    CHECK(msg.find("init_amp") != std::string::npos);
}

TEST_CASE("initial range must sit inside the admissible band") {
    const std::string msg = error_text("init_mean = 0.999\n");
    CHECK(msg.find("admissible band") != std::string::npos);

    // With a wider margin the same mean passes.
    auto ok = cli::parse_config_text("init_mean = 0.9\ninit_amp = 0.01\n");
    CHECK(ok.init_mean == 0.9);
}

TEST_CASE("snapshot times outside the horizon are rejected") {
    const std::string msg = error_text("t_end = 1\nsnapshot_times = 0.5, 2.0\n");
    CHECK(msg.find("snapshot_times") != std::string::npos);
}

TEST_CASE("bench policies accept step sizes and the adaptive keyword") {
    auto c = cli::parse_config_text("bench_policies = 0.02, adaptive\n");
    CHECK(c.bench_policies == std::vector<std::string>{"0.02", "adaptive"});
    const std::string msg = error_text("bench_policies = fast\n");
    CHECK(msg.find("bench_policies") != std::string::npos);
}

TEST_CASE("missing config file is a config error") {
    CHECK_THROWS_AS(cli::parse_config_file("/nonexistent/path/run.cfg"), ConfigError);
}

TEST_CASE("derived accessors reflect the parsed values") {
    auto c = cli::parse_config_text(
        "nx = 16\nny = 12\nlx = 2\nly = 3\nband_margin = 0.05\n"
        "cg_tol = 1e-9\ncg_tol_mode = absolute\nnewton_maxit = 7\nband_policy = clamp\n"
        "assert_stability = false\n");
    auto g = c.make_grid();
    CHECK(g.nx == 16);
    CHECK(g.ny == 12);
    CHECK(g.hx == 2.0 / 16.0);
    auto band = c.band();
    CHECK(band.lo == 0.05);
    CHECK(band.hi == doctest::Approx(0.95).epsilon(1e-15));
    auto o = c.step_options();
    CHECK(o.cg_tol == 1e-9);
    CHECK(o.cg_absolute_tol);
    CHECK(o.newton_maxit == 7);
    CHECK(o.clamp_band);
    CHECK(!o.assert_l2);
    CHECK(o.band.lo == band.lo);
}
