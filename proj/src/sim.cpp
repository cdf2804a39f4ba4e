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

#include "mmctdgl/sim.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "mmctdgl/errors.hpp"
#include "mmctdgl/io.hpp"
#include "mmctdgl/schemes.hpp"
#include "mmctdgl/stepper.hpp"

namespace mmctdgl::sim {

Field2D init_field(const Grid2D& g, double mean, double amp, std::uint64_t seed) {
    if (!(amp >= 0.0)) throw ConfigError("init_amp must be nonnegative");
    Field2D f(g);
    // Zero amplitude must give the exact constant; the centering pass below
    // would perturb it by the rounding error of the sample mean.
    if (amp == 0.0) {
        for (double& v : f.values) v = mean;
        return f;
    }
    // Raw engine output mapped to [-1, 1) by the fixed (x >> 11) * 2^-53
    // ladder; distribution classes would make the byte stream
    // implementation-defined.
    std::mt19937_64 rng(seed);
    for (double& v : f.values) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = mean + amp * (2.0 * u - 1.0);
    }
    const double shift = mean - grid::mean(f);
    for (double& v : f.values) v += shift;
    return f;
}

double relative_error(const Field2D& a, const Field2D& b) {
    if (!(a.grid == b.grid)) throw DomainError("relative error needs fields on the same grid");
    return grid::l2_norm(a - b);
}

namespace {

EnergyRecord make_record(double t, double dt, const Field2D& phi, double energy, double l2,
                         int cg_iters, int newton_iters, bool fallback) {
    EnergyRecord rec;
    rec.t = t;
    rec.dt = dt;
    rec.U = energy;
    rec.U_per_volume = energy / (phi.grid.lx * phi.grid.ly);
    rec.l2_norm = l2;
    rec.mean_phi = grid::mean(phi);
    grid::minmax(phi, rec.min_phi, rec.max_phi);
    rec.cg_iters = cg_iters;
    rec.newton_iters = newton_iters;
    rec.fallback_used = fallback;
    return rec;
}

bool contains_time(const std::vector<double>& times, double t) {
    for (const double v : times) {
        if (v == t) return true;
    }
    return false;
}

// Fills `out` as it goes so a failed run still leaves the log and the last
// good state behind for diagnostics.
void run_collect(const RunConfig& cfg, RunResult& out) {
    cfg.validate();
    const physics::AdmissibleBand bd = cfg.band();
    const physics::ValidationReport vr = physics::validate_params(cfg.params, bd);
    if (!vr.ok) throw ConfigError("parameter validation failed: " + vr.message);

    const Grid2D g = cfg.make_grid();
    Field2D phi = init_field(g, cfg.init_mean, cfg.init_amp, cfg.seed);
    {
        double mn = 0.0, mx = 0.0;
        grid::minmax(phi, mn, mx);
        if (!bd.contains(mn) || !bd.contains(mx)) {
            throw ConfigError("initial field leaves the admissible band");
        }
    }

    const schemes::StepOptions opts = cfg.step_options();
    stepper::StepControl ctrl = cfg.control;
    if (cfg.mu_rescale_t2) {
        // Alternative to editing the lambda schedule when temp != 1.
        ctrl.mu = ctrl.mu / (cfg.params.temp * cfg.params.temp);
    }

    std::vector<double> events = cfg.snapshot_times;
    if (!contains_time(events, cfg.t_end)) events.push_back(cfg.t_end);

    double energy = physics::total_energy(phi, cfg.params);
    out.log.push_back(make_record(0.0, 0.0, phi, energy, grid::l2_norm(phi), 0, 0, false));
    out.snapshots.emplace_back(0.0, phi);
    out.final_field = phi;

    stepper::EnergyHistory history;
    history.push(0.0, energy);

    double t = 0.0;
    while (t < cfg.t_end) {
        double dt = 0.0;
        if (ctrl.mode == stepper::StepMode::Constant) {
            dt = ctrl.dt;
        } else {
            const auto uprime = stepper::estimate_uprime(history, ctrl.uprime_window);
            dt = uprime ? stepper::next_dt(t, *uprime, ctrl) : ctrl.dt_min;
        }
        dt = stepper::snap_to_events(dt, t, events);

        auto [phi_next, rep] = cfg.scheme == schemes::SchemeKind::Linear
                                   ? schemes::linear_step(phi, dt, cfg.params, opts)
                                   : schemes::nonlinear_step(phi, dt, cfg.params, opts);

        // Landing on an event assigns its exact time; accumulation never
        // drifts a snapshot off its filename.
        double t_next = t + dt;
        for (const double e : events) {
            if (e - t == dt) {
                t_next = e;
                break;
            }
        }
        if (t_next > cfg.t_end) t_next = cfg.t_end;

        phi = std::move(phi_next);
        ++out.steps;
        out.log.push_back(make_record(t_next, dt, phi, rep.energy_after, rep.l2_after,
                                      rep.solver.iterations, rep.newton_iterations,
                                      rep.solver.fallback_used));
        history.push(t_next, rep.energy_after);
        out.final_field = phi;
        if (contains_time(cfg.snapshot_times, t_next) && t_next != 0.0) {
            out.snapshots.emplace_back(t_next, phi);
        }
        t = t_next;
    }

    if (out.snapshots.empty() || out.snapshots.back().first != cfg.t_end) {
        out.snapshots.emplace_back(cfg.t_end, phi);
    }
}

}  // namespace

RunResult run(const RunConfig& cfg) {
    RunResult out;
    run_collect(cfg, out);
    return out;
}

std::string energy_csv(const std::vector<EnergyRecord>& log) {
    std::ostringstream out;
    out << "t,dt,U,U_per_volume,l2_norm,mean_phi,min_phi,max_phi,cg_iters,newton_iters,fallback\n";
    for (const EnergyRecord& r : log) {
        out << io::format_shortest(r.t) << ',' << io::format_shortest(r.dt) << ','
            << io::format_shortest(r.U) << ',' << io::format_shortest(r.U_per_volume) << ','
            << io::format_shortest(r.l2_norm) << ',' << io::format_shortest(r.mean_phi) << ','
            << io::format_shortest(r.min_phi) << ',' << io::format_shortest(r.max_phi) << ','
            << r.cg_iters << ',' << r.newton_iters << ',' << (r.fallback_used ? 1 : 0) << '\n';
    }
    return out.str();
}

void write_snapshot(const Field2D& f, double t, const std::string& dir) {
    const std::string stem = dir + "/" + io::snapshot_stem(t);
    io::write_field_csv(f, stem + ".csv");
    io::write_field_pgm(f, stem + ".pgm");
}

RunResult run_to_dir(const RunConfig& cfg, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

    io::write_text_file(out_dir + "/config.echo", cli::print_config(cfg));

    RunResult out;
    try {
        run_collect(cfg, out);
    } catch (const Error&) {
        // Leave the diagnostic bundle behind: the partial log plus the last
        // state that completed a step.
        if (!out.log.empty()) {
            io::write_text_file(out_dir + "/energy.csv", energy_csv(out.log));
            write_snapshot(out.final_field, out.log.back().t, out_dir);
        }
        throw;
    }

    io::write_text_file(out_dir + "/energy.csv", energy_csv(out.log));
    for (const auto& [t, f] : out.snapshots) {
        write_snapshot(f, t, out_dir);
    }
    return out;
}

BenchResult bench(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.bench_times.empty()) throw ConfigError("bench_times must not be empty");

    BenchResult result;
    result.times = cfg.bench_times;
    const double horizon = cfg.bench_times.back();

    const auto with_horizon = [&](const RunConfig& base) {
        RunConfig c = base;
        c.t_end = horizon;
        c.snapshot_times = cfg.bench_times;
        return c;
    };

    RunConfig ref_cfg = with_horizon(cfg);
    ref_cfg.control.mode = stepper::StepMode::Constant;
    ref_cfg.control.dt = cfg.bench_ref_dt;
    const RunResult ref = run(ref_cfg);

    const auto snapshot_at = [](const RunResult& r, double t) -> const Field2D& {
        for (const auto& [st, f] : r.snapshots) {
            if (st == t) return f;
        }
        throw DomainError("no snapshot captured at t=" + io::format_shortest(t));
    };

    for (const std::string& policy : cfg.bench_policies) {
        BenchRow row;
        row.policy = policy;
        RunConfig pcfg = with_horizon(cfg);
        if (policy == "adaptive") {
            pcfg.control.mode = stepper::StepMode::Adaptive;
        } else {
            pcfg.control.mode = stepper::StepMode::Constant;
            pcfg.control.dt = io::parse_double(policy);
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            const RunResult res = run(pcfg);
            row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            row.steps = res.steps;
            for (const double t : cfg.bench_times) {
                row.re.push_back(relative_error(snapshot_at(res, t), snapshot_at(ref, t)));
            }
        } catch (const Error&) {
            row.failed = true;
            row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        result.rows.push_back(std::move(row));
    }

    std::ostringstream csv;
    csv << "policy,steps,wall_seconds";
    for (const double t : result.times) {
        csv << ",re_t" << io::format_shortest(t);
    }
    csv << '\n';
    for (const BenchRow& row : result.rows) {
        csv << row.policy << ',' << row.steps << ',' << io::format_shortest(row.wall_seconds);
        for (std::size_t i = 0; i < result.times.size(); ++i) {
            csv << ',' << (row.failed || i >= row.re.size() ? "nan" : io::format_shortest(row.re[i]));
        }
        csv << '\n';
    }
    result.csv = csv.str();
    return result;
}

}  // namespace mmctdgl::sim
