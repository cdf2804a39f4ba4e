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

#include <string>

#include "mmctdgl/config.hpp"

namespace mmctdgl::cli {

// Subcommand bodies; each returns the process exit code
// (0 ok, 1 config error, 2 runtime failure).
int cmd_run(const std::string& config_path, const std::string& out_dir);
int cmd_compare(const std::string& dir_a, const std::string& dir_b, double t);
int cmd_bench(const std::string& config_path, const std::string& out_dir);
int cmd_validate(const std::string& config_path);

// Applies MMC_TDGL_THREADS (0 or unset = auto) and MMC_TDGL_SIMD to the
// kernel layer; called once at process start.
void apply_environment();

}  // namespace mmctdgl::cli
