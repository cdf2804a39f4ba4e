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

#include <stdexcept>
#include <string>

namespace mmctdgl {

// Error taxonomy maps onto CLI exit codes: ConfigError -> 1, everything else -> 2.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Scalar or field value outside its admissible domain.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

struct SolveStatsSnapshot {
    int iterations = 0;
    double final_residual_norm = 0.0;
    bool converged = false;
    bool fallback_used = false;
};

// Krylov solver gave up; stats describe the failed attempt.
struct SolveError : Error {
    SolveStatsSnapshot stats;
    SolveError(const std::string& msg, SolveStatsSnapshot s) : Error(msg), stats(s) {}
};

// A time step could not be completed (solver failure, band violation, Newton
// divergence, stability assertion).
struct StepError : Error {
    explicit StepError(const std::string& msg) : Error(msg) {}
};

}  // namespace mmctdgl
