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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mmctdgl/cli.hpp"
#include "mmctdgl/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Phase separation of MMC hydrogels: semi-implicit solvers with adaptive stepping"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string dir_a;
    std::string dir_b;
    double time = 0.0;

    CLI::App* run = app.add_subcommand("run", "Run a simulation and write its outputs");
    run->add_option("--config", config_path, "Config file, key = value lines")->required();
    run->add_option("--out", out_dir, "Output directory")->required();

    CLI::App* compare = app.add_subcommand("compare", "L2 distance between two runs at one time");
    compare->add_option("--a", dir_a, "First run directory")->required();
    compare->add_option("--b", dir_b, "Second run directory")->required();
    compare->add_option("--time", time, "Snapshot time present in both runs")->required();

    CLI::App* bench = app.add_subcommand("bench", "Step-size policy benchmark against a reference run");
    bench->add_option("--config", config_path, "Config file, key = value lines")->required();
    bench->add_option("--out", out_dir, "Output directory")->required();

    CLI::App* validate = app.add_subcommand("validate", "Check a config and its parameter regime");
    validate->add_option("--config", config_path, "Config file, key = value lines")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        mmctdgl::cli::apply_environment();
    } catch (const mmctdgl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }

    if (run->parsed()) return mmctdgl::cli::cmd_run(config_path, out_dir);
    if (compare->parsed()) return mmctdgl::cli::cmd_compare(dir_a, dir_b, time);
    if (bench->parsed()) return mmctdgl::cli::cmd_bench(config_path, out_dir);
    return mmctdgl::cli::cmd_validate(config_path);
}
