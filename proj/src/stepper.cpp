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

#include "mmctdgl/stepper.hpp"

#include <cmath>
#include <sstream>

#include "mmctdgl/errors.hpp"

namespace mmctdgl::stepper {

void StepControl::check() const {
    std::ostringstream bad;
    const auto complain = [&bad](const std::string& text) {
        if (bad.tellp() > 0) bad << "; ";
        bad << text;
    };
    if (!(dt > 0.0)) complain("dt must be positive");
    if (!(dt_min > 0.0)) complain("dt_min must be positive");
    if (!(dt_max >= dt_min)) complain("dt_max must be at least dt_min");
    if (!(mu >= 0.0)) complain("mu must be nonnegative");
    if (uprime_window < 1) complain("uprime_window must be at least 1");
    if (lambda_table.empty()) {
        complain("lambda_table must not be empty");
    } else {
        double prev = -std::numeric_limits<double>::infinity();
        for (const auto& [bound, factor] : lambda_table) {
            if (!(bound > prev)) complain("lambda_table bounds must increase strictly");
            if (!(factor > 0.0)) complain("lambda_table factors must be positive");
            prev = bound;
        }
        if (!std::isinf(lambda_table.back().first)) {
            complain("lambda_table must end with an inf bound");
        }
    }
    if (bad.tellp() > 0) throw ConfigError("step control: " + bad.str());
}

void EnergyHistory::push(double t, double u) {
    if (!samples.empty() && !(t > samples.back().first)) {
        throw DomainError("energy history times must increase strictly");
    }
    samples.emplace_back(t, u);
    // Far above any derivative window; keeps long runs at constant memory.
    while (samples.size() > 4096) samples.pop_front();
}

double lambda_at(double t, const StepControl& ctrl) {
    // Interval (prev_bound, bound] owns its right endpoint; everything below
    // the first bound, including t = 0, takes the first factor.
    for (const auto& [bound, factor] : ctrl.lambda_table) {
        if (t <= bound) return factor;
    }
    return ctrl.lambda_table.back().second;
}

std::optional<double> estimate_uprime(const EnergyHistory& h, int window) {
    const std::size_t n = h.samples.size();
    if (n < 2 || window < 1) return std::nullopt;
    const std::size_t pairs = std::min<std::size_t>(window, n - 1);
    double acc = 0.0;
    for (std::size_t k = n - pairs; k < n; ++k) {
        const auto& [t0, u0] = h.samples[k - 1];
        const auto& [t1, u1] = h.samples[k];
        acc += (u1 - u0) / (t1 - t0);
    }
    return acc / static_cast<double>(pairs);
}

double next_dt(double t, double uprime, const StepControl& ctrl) {
    const double lam = lambda_at(t, ctrl);
    return std::max(ctrl.dt_min, lam * ctrl.dt_max / std::sqrt(1.0 + ctrl.mu * uprime * uprime));
}

double snap_to_events(double dt, double t, const std::vector<double>& event_times) {
    double best = dt;
    for (const double e : event_times) {
        const double d = e - t;
        if (d > 0.0 && d <= best) best = d;
    }
    return best;
}

}  // namespace mmctdgl::stepper
