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

#include "mmctdgl/config.hpp"
#include "mmctdgl/grid.hpp"

namespace mmctdgl::sim {

using grid::Field2D;
using grid::Grid2D;

struct EnergyRecord {
    double t = 0.0;
    double dt = 0.0;
    double U = 0.0;
    double U_per_volume = 0.0;
    double l2_norm = 0.0;
    double mean_phi = 0.0;
    double min_phi = 0.0;
    double max_phi = 0.0;
    int cg_iters = 0;
    int newton_iters = 0;
    bool fallback_used = false;
};

struct RunResult {
    Field2D final_field;
    std::vector<EnergyRecord> log;
    // Saved at t=0 and every requested snapshot time, in time order.
    std::vector<std::pair<double, Field2D>> snapshots;
    std::uint64_t steps = 0;
};

// mean + amp*u, u i.i.d. uniform on [-1,1) from a seeded generator with a
// platform-fixed bit stream, then shifted so the mean is exactly `mean`.
Field2D init_field(const Grid2D& g, double mean, double amp, std::uint64_t seed);

// Full time loop: stepper chooses dt, events snap it, the scheme advances,
// every step appends one EnergyRecord. Deterministic for a fixed config.
RunResult run(const RunConfig& cfg);

// run() plus the on-disk layout: config.echo, energy.csv and snapshot
// CSV/PGM pairs inside out_dir. Nothing is written elsewhere.
RunResult run_to_dir(const RunConfig& cfg, const std::string& out_dir);

// Weighted L2 distance, the comparison metric of the benchmark tables.
double relative_error(const Field2D& a, const Field2D& b);

void write_snapshot(const Field2D& f, double t, const std::string& dir);

std::string energy_csv(const std::vector<EnergyRecord>& log);

struct BenchRow {
    std::string policy;
    bool failed = false;
    std::uint64_t steps = 0;
    double wall_seconds = 0.0;
    std::vector<double> re;  // one entry per comparison time
};

struct BenchResult {
    std::vector<double> times;
    std::vector<BenchRow> rows;
    std::string csv;  // header policy,steps,wall_seconds,re_t...
};

// Reference run at bench_ref_dt, then each candidate policy; rows carry step
// counts, wall time and the L2 distance to the reference at bench_times.
BenchResult bench(const RunConfig& cfg);

}  // namespace mmctdgl::sim
