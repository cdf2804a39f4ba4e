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

#include <deque>
#include <limits>
#include <optional>
#include <vector>

namespace mmctdgl::stepper {

enum class StepMode { Constant, Adaptive };

struct StepControl {
    StepMode mode = StepMode::Constant;
    double dt = 0.001;      // Constant mode
    double dt_min = 0.001;  // Adaptive mode below
    double dt_max = 0.1;
    double mu = 1000.0;
    // Piecewise-constant schedule: factor applies for t in (prev_bound, bound].
    // Bounds strictly increasing, last one infinity.
    std::vector<std::pair<double, double>> lambda_table = {
        {100.0, 1.0}, {200.0, 1.5}, {300.0, 2.0},
        {400.0, 3.0}, {500.0, 4.0}, {std::numeric_limits<double>::infinity(), 5.0}};
    int uprime_window = 1;  // slopes averaged for the energy derivative estimate

    void check() const;  // throws ConfigError listing violations
};

// (t, U) samples, most recent last, strictly increasing t.
struct EnergyHistory {
    std::deque<std::pair<double, double>> samples;

    void push(double t, double u);
    std::size_t size() const { return samples.size(); }
};

double lambda_at(double t, const StepControl& ctrl);

// Backward difference of the last window of slopes; empty when fewer than
// two samples exist (the first step then uses dt_min).
std::optional<double> estimate_uprime(const EnergyHistory& h, int window);

// max(dt_min, lambda(t)*dt_max / sqrt(1 + mu*uprime^2))
double next_dt(double t, double uprime, const StepControl& ctrl);

// Shrinks dt so the step lands exactly on the next event in (t, t+dt], if
// any. An event exactly at t is considered already handled.
double snap_to_events(double dt, double t, const std::vector<double>& event_times);

}  // namespace mmctdgl::stepper
