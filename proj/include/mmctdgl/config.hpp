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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmctdgl/physics.hpp"
#include "mmctdgl/schemes.hpp"
#include "mmctdgl/stepper.hpp"

namespace mmctdgl::sim {

enum class BandPolicy { Strict, Clamp };

// Everything a run needs, parseable from the flat key = value config format.
// The output directory is a CLI argument, not part of the config.
struct RunConfig {
    int nx = 64;
    int ny = 64;
    double lx = 6.283185307179586;
    double ly = 6.283185307179586;
    physics::SimParams params;
    schemes::SchemeKind scheme = schemes::SchemeKind::Linear;
    stepper::StepControl control;
    double t_end = 1.0;
    std::uint64_t seed = 1;
    double init_mean = 0.65;
    double init_amp = 0.05;
    std::vector<double> snapshot_times;
    double cg_tol = 1e-6;
    bool cg_tol_absolute = false;
    int cg_maxit = 0;  // 0 = 10*nx*ny
    double newton_tol = 1e-8;
    int newton_maxit = 50;
    double fd_eps = 1e-6;
    double band_margin = 1e-4;
    BandPolicy band_policy = BandPolicy::Strict;
    bool assert_stability = true;
    bool mu_rescale_t2 = false;   // divide mu by temp^2 instead of editing lambda
    // bench subcommand inputs
    double bench_ref_dt = 1e-4;
    std::vector<std::string> bench_policies = {"0.05", "0.01", "0.005", "adaptive"};
    std::vector<double> bench_times = {1.0, 10.0, 100.0, 200.0};

    bool operator==(const RunConfig& o) const;

    grid::Grid2D make_grid() const;
    physics::AdmissibleBand band() const;
    schemes::StepOptions step_options() const;
    // Collects every invariant violation and throws one ConfigError.
    void validate() const;
};

}  // namespace mmctdgl::sim

namespace mmctdgl::cli {

// Line-oriented `key = value` with `#` comments. Unknown and duplicate keys
// are hard errors carrying the line number; invariant violations are
// collected and reported together.
sim::RunConfig parse_config_text(const std::string& text);
sim::RunConfig parse_config_file(const std::string& path);

// Full key set in fixed order, floats as shortest round-trip decimals.
// parse_config_text(print_config(c)) == c.
std::string print_config(const sim::RunConfig& c);

}  // namespace mmctdgl::cli
