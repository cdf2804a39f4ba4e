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

#include "mmctdgl/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>

#include "mmctdgl/errors.hpp"
#include "mmctdgl/io.hpp"
#include "mmctdgl/kernels.hpp"
#include "mmctdgl/physics.hpp"
#include "mmctdgl/sim.hpp"

namespace mmctdgl::cli {

namespace {

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

void apply_environment() {
    if (const char* raw = std::getenv("MMC_TDGL_THREADS")) {
        const std::string value(raw);
        int cap = 0;
        const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), cap);
        if (ec != std::errc() || p != value.data() + value.size() || cap < 0) {
            throw ConfigError("MMC_TDGL_THREADS must be a nonnegative integer, got '" + value + "'");
        }
        kernels::set_thread_cap(cap);
    }
    if (const char* raw = std::getenv("MMC_TDGL_SIMD")) {
        try {
            kernels::select_lane(raw);
        } catch (const Error& e) {
            throw ConfigError(std::string("MMC_TDGL_SIMD: ") + e.what());
        }
    }
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    return run_guarded([&] {
        const sim::RunConfig cfg = parse_config_file(config_path);
        const sim::RunResult res = sim::run_to_dir(cfg, out_dir);
        std::cout << "completed " << res.steps << " steps to t=" << io::format_shortest(cfg.t_end)
                  << "; final energy " << io::format_shortest(res.log.back().U) << "; wrote "
                  << out_dir << '\n';
    });
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b, double t) {
    return run_guarded([&] {
        const sim::RunConfig cfg_a = parse_config_file(dir_a + "/config.echo");
        const sim::RunConfig cfg_b = parse_config_file(dir_b + "/config.echo");
        const std::string name = io::snapshot_stem(t) + ".csv";
        const grid::Field2D a = io::read_field_csv(dir_a + "/" + name, cfg_a.lx, cfg_a.ly);
        const grid::Field2D b = io::read_field_csv(dir_b + "/" + name, cfg_b.lx, cfg_b.ly);
        const double re = sim::relative_error(a, b);
        std::cout << "re = " << io::format_shortest(re) << '\n';
    });
}

int cmd_bench(const std::string& config_path, const std::string& out_dir) {
    return run_guarded([&] {
        const sim::RunConfig cfg = parse_config_file(config_path);
        const sim::BenchResult res = sim::bench(cfg);
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
        io::write_text_file(out_dir + "/config.echo", print_config(cfg));
        io::write_text_file(out_dir + "/bench.csv", res.csv);
        std::cout << res.csv;
    });
}

int cmd_validate(const std::string& config_path) {
    return run_guarded([&] {
        const sim::RunConfig cfg = parse_config_file(config_path);
        const physics::ValidationReport rep = physics::validate_params(cfg.params, cfg.band());
        if (!rep.ok) throw ConfigError(rep.message);
        std::cout << rep.message << '\n';
    });
}

}  // namespace mmctdgl::cli
