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

#include "mmctdgl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "mmctdgl/io.hpp"

namespace mmctdgl::sim {

namespace {

bool params_equal(const physics::SimParams& a, const physics::SimParams& b) {
    return a.m0 == b.m0 && a.chi == b.chi && a.tau == b.tau && a.ncoef == b.ncoef &&
           a.rho == b.rho && a.kb == b.kb && a.temp == b.temp && a.kcoef == b.kcoef &&
           a.alpha == b.alpha && a.beta == b.beta;
}

bool control_equal(const stepper::StepControl& a, const stepper::StepControl& b) {
    return a.mode == b.mode && a.dt == b.dt && a.dt_min == b.dt_min && a.dt_max == b.dt_max &&
           a.mu == b.mu && a.lambda_table == b.lambda_table && a.uprime_window == b.uprime_window;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
    return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly && params_equal(params, o.params) &&
           scheme == o.scheme && control_equal(control, o.control) && t_end == o.t_end &&
           seed == o.seed && init_mean == o.init_mean && init_amp == o.init_amp &&
           snapshot_times == o.snapshot_times && cg_tol == o.cg_tol &&
           cg_tol_absolute == o.cg_tol_absolute && cg_maxit == o.cg_maxit &&
           newton_tol == o.newton_tol && newton_maxit == o.newton_maxit && fd_eps == o.fd_eps &&
           band_margin == o.band_margin && band_policy == o.band_policy &&
           assert_stability == o.assert_stability && mu_rescale_t2 == o.mu_rescale_t2 &&
           bench_ref_dt == o.bench_ref_dt && bench_policies == o.bench_policies &&
           bench_times == o.bench_times;
}

grid::Grid2D RunConfig::make_grid() const { return grid::Grid2D(nx, ny, lx, ly); }

physics::AdmissibleBand RunConfig::band() const {
    return physics::AdmissibleBand::with_margin(params, band_margin);
}

schemes::StepOptions RunConfig::step_options() const {
    schemes::StepOptions o;
    o.cg_tol = cg_tol;
    o.cg_absolute_tol = cg_tol_absolute;
    o.cg_maxit = cg_maxit;
    o.newton_tol = newton_tol;
    o.newton_maxit = newton_maxit;
    o.fd_eps = fd_eps;
    o.band = band();
    o.clamp_band = band_policy == BandPolicy::Clamp;
    o.assert_l2 = assert_stability;
    return o;
}

void RunConfig::validate() const {
    std::ostringstream bad;
    const auto complain = [&bad](const std::string& text) {
        if (bad.tellp() > 0) bad << "; ";
        bad << text;
    };

    if (nx < 4 || ny < 4) complain("nx and ny must be at least 4");
    if (!(lx > 0.0) || !(ly > 0.0)) complain("lx and ly must be positive");
    try {
        params.check_structural();
    } catch (const ConfigError& e) {
        complain(e.what());
    }
    try {
        control.check();
    } catch (const ConfigError& e) {
        complain(e.what());
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) complain("t_end must be finite and nonnegative");
    if (!(init_amp >= 0.0)) complain("init_amp must be nonnegative");

    bool have_band = false;
    physics::AdmissibleBand bd;
    try {
        bd = band();
        have_band = true;
    } catch (const Error& e) {
        complain(std::string("band_margin: ") + e.what());
    }
    if (have_band) {
        if (!bd.contains(init_mean - init_amp) || !bd.contains(init_mean + init_amp)) {
            std::ostringstream m;
            m << "initial range [" << init_mean - init_amp << ", " << init_mean + init_amp
              << "] must lie inside the admissible band (" << bd.lo << ", " << bd.hi << ")";
            complain(m.str());
        }
    }
    for (const double s : snapshot_times) {
        if (!(s >= 0.0) || !(s <= t_end)) {
            complain("snapshot_times entries must lie in [0, t_end]");
            break;
        }
    }
    if (!(cg_tol > 0.0)) complain("cg_tol must be positive");
    if (cg_maxit < 0) complain("cg_maxit must be nonnegative (0 means automatic)");
    if (!(newton_tol > 0.0)) complain("newton_tol must be positive");
    if (newton_maxit < 1) complain("newton_maxit must be at least 1");
    if (!(fd_eps > 0.0)) complain("fd_eps must be positive");
    if (!(bench_ref_dt > 0.0)) complain("bench_ref_dt must be positive");
    if (bench_policies.empty()) complain("bench_policies must not be empty");
    for (const std::string& pol : bench_policies) {
        if (pol == "adaptive") continue;
        double v = 0.0;
        const auto [p, ec] = std::from_chars(pol.data(), pol.data() + pol.size(), v);
        if (ec != std::errc() || p != pol.data() + pol.size() || !(v > 0.0)) {
            complain("bench_policies entry '" + pol + "' is neither 'adaptive' nor a positive step");
        }
    }
    for (const double t : bench_times) {
        if (!(t > 0.0)) {
            complain("bench_times entries must be positive");
            break;
        }
    }

    if (bad.tellp() > 0) throw ConfigError(bad.str());
}

}  // namespace mmctdgl::sim

namespace mmctdgl::cli {

namespace {

using sim::BandPolicy;
using sim::RunConfig;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const std::size_t comma = value.find(',', start);
        const std::string tok =
            trim(comma == std::string::npos ? value.substr(start) : value.substr(start, comma - start));
        if (!tok.empty()) out.push_back(tok);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct LineContext {
    int line = 0;

    [[noreturn]] void fail(const std::string& text) const {
        throw ConfigError("line " + std::to_string(line) + ": " + text);
    }

    double number(const std::string& key, const std::string& value) const {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || p != value.data() + value.size()) {
            fail("value for '" + key + "' is not a number: '" + value + "'");
        }
        return v;
    }

    int integer(const std::string& key, const std::string& value) const {
        int v = 0;
        const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || p != value.data() + value.size()) {
            fail("value for '" + key + "' is not an integer: '" + value + "'");
        }
        return v;
    }

    std::uint64_t unsigned64(const std::string& key, const std::string& value) const {
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || p != value.data() + value.size()) {
            fail("value for '" + key + "' is not an unsigned integer: '" + value + "'");
        }
        return v;
    }

    bool boolean(const std::string& key, const std::string& value) const {
        if (value == "true") return true;
        if (value == "false") return false;
        fail("value for '" + key + "' must be 'true' or 'false', got '" + value + "'");
    }

    std::vector<double> number_list(const std::string& key, const std::string& value) const {
        std::vector<double> out;
        for (const std::string& tok : split_list(value)) out.push_back(number(key, tok));
        return out;
    }

    std::vector<std::pair<double, double>> lambda_list(const std::string& key,
                                                       const std::string& value) const {
        std::vector<std::pair<double, double>> out;
        for (const std::string& tok : split_list(value)) {
            const std::size_t colon = tok.find(':');
            if (colon == std::string::npos) {
                fail("entry '" + tok + "' of '" + key + "' must look like bound:factor");
            }
            const std::string bound = trim(tok.substr(0, colon));
            const std::string factor = trim(tok.substr(colon + 1));
            out.emplace_back(number(key, bound), number(key, factor));
        }
        return out;
    }
};

void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

sim::RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    LineContext at;

    std::istringstream stream(text);
    std::string raw;
    while (std::getline(stream, raw)) {
        ++at.line;
        const std::size_t hash = raw.find('#');
        const std::string stripped = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (stripped.empty()) continue;

        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) at.fail("expected 'key = value', got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) at.fail("missing key before '='");
        if (!seen.insert(key).second) at.fail("duplicate key '" + key + "'");

        if (key == "nx") {
            cfg.nx = at.integer(key, value);
        } else if (key == "ny") {
            cfg.ny = at.integer(key, value);
        } else if (key == "lx") {
            cfg.lx = at.number(key, value);
        } else if (key == "ly") {
            cfg.ly = at.number(key, value);
        } else if (key == "m0") {
            cfg.params.m0 = at.number(key, value);
        } else if (key == "chi") {
            cfg.params.chi = at.number(key, value);
        } else if (key == "tau") {
            cfg.params.tau = at.number(key, value);
        } else if (key == "ncoef") {
            cfg.params.ncoef = at.number(key, value);
        } else if (key == "rho") {
            cfg.params.rho = at.number(key, value);
        } else if (key == "kb") {
            cfg.params.kb = at.number(key, value);
        } else if (key == "temp") {
            cfg.params.temp = at.number(key, value);
        } else if (key == "kcoef") {
            cfg.params.kcoef = at.number(key, value);
        } else if (key == "alpha") {
            cfg.params.alpha = at.number(key, value);
        } else if (key == "beta") {
            cfg.params.beta = at.number(key, value);
        } else if (key == "scheme") {
            if (value == "linear") {
                cfg.scheme = schemes::SchemeKind::Linear;
            } else if (value == "nonlinear") {
                cfg.scheme = schemes::SchemeKind::Nonlinear;
            } else {
                at.fail("value for 'scheme' must be 'linear' or 'nonlinear', got '" + value + "'");
            }
        } else if (key == "step_mode") {
            if (value == "constant") {
                cfg.control.mode = stepper::StepMode::Constant;
            } else if (value == "adaptive") {
                cfg.control.mode = stepper::StepMode::Adaptive;
            } else {
                at.fail("value for 'step_mode' must be 'constant' or 'adaptive', got '" + value + "'");
            }
        } else if (key == "dt") {
            cfg.control.dt = at.number(key, value);
        } else if (key == "dt_min") {
            cfg.control.dt_min = at.number(key, value);
        } else if (key == "dt_max") {
            cfg.control.dt_max = at.number(key, value);
        } else if (key == "mu") {
            cfg.control.mu = at.number(key, value);
        } else if (key == "lambda_table") {
            cfg.control.lambda_table = at.lambda_list(key, value);
        } else if (key == "uprime_window") {
            cfg.control.uprime_window = at.integer(key, value);
        } else if (key == "mu_rescale_t2") {
            cfg.mu_rescale_t2 = at.boolean(key, value);
        } else if (key == "t_end") {
            cfg.t_end = at.number(key, value);
        } else if (key == "seed") {
            cfg.seed = at.unsigned64(key, value);
        } else if (key == "init_mean") {
            cfg.init_mean = at.number(key, value);
        } else if (key == "init_amp") {
            cfg.init_amp = at.number(key, value);
        } else if (key == "snapshot_times") {
            cfg.snapshot_times = at.number_list(key, value);
            sort_unique(cfg.snapshot_times);
        } else if (key == "cg_tol") {
            cfg.cg_tol = at.number(key, value);
        } else if (key == "cg_tol_mode") {
            if (value == "relative") {
                cfg.cg_tol_absolute = false;
            } else if (value == "absolute") {
                cfg.cg_tol_absolute = true;
            } else {
                at.fail("value for 'cg_tol_mode' must be 'relative' or 'absolute', got '" + value + "'");
            }
        } else if (key == "cg_maxit") {
            cfg.cg_maxit = at.integer(key, value);
        } else if (key == "newton_tol") {
            cfg.newton_tol = at.number(key, value);
        } else if (key == "newton_maxit") {
            cfg.newton_maxit = at.integer(key, value);
        } else if (key == "fd_eps") {
            cfg.fd_eps = at.number(key, value);
        } else if (key == "band_margin") {
            cfg.band_margin = at.number(key, value);
        } else if (key == "band_policy") {
            if (value == "strict") {
                cfg.band_policy = BandPolicy::Strict;
            } else if (value == "clamp") {
                cfg.band_policy = BandPolicy::Clamp;
            } else {
                at.fail("value for 'band_policy' must be 'strict' or 'clamp', got '" + value + "'");
            }
        } else if (key == "assert_stability") {
            cfg.assert_stability = at.boolean(key, value);
        } else if (key == "bench_ref_dt") {
            cfg.bench_ref_dt = at.number(key, value);
        } else if (key == "bench_policies") {
            cfg.bench_policies = split_list(value);
        } else if (key == "bench_times") {
            cfg.bench_times = at.number_list(key, value);
            sort_unique(cfg.bench_times);
        } else {
            at.fail("unknown key '" + key + "'");
        }
    }

    cfg.validate();
    return cfg;
}

sim::RunConfig parse_config_file(const std::string& path) {
    std::string text;
    try {
        text = io::read_text_file(path);
    } catch (const IoError& e) {
        throw ConfigError(std::string("cannot read config file: ") + e.what());
    }
    return parse_config_text(text);
}

std::string print_config(const sim::RunConfig& c) {
    std::ostringstream out;
    const auto num = [](double v) { return io::format_shortest(v); };
    const auto join = [&num](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) s += ", ";
            s += num(v[i]);
        }
        return s;
    };

    out << "nx = " << c.nx << '\n';
    out << "ny = " << c.ny << '\n';
    out << "lx = " << num(c.lx) << '\n';
    out << "ly = " << num(c.ly) << '\n';
    out << "m0 = " << num(c.params.m0) << '\n';
    out << "chi = " << num(c.params.chi) << '\n';
    out << "tau = " << num(c.params.tau) << '\n';
    out << "ncoef = " << num(c.params.ncoef) << '\n';
    out << "rho = " << num(c.params.rho) << '\n';
    out << "kb = " << num(c.params.kb) << '\n';
    out << "temp = " << num(c.params.temp) << '\n';
    out << "kcoef = " << num(c.params.kcoef) << '\n';
    out << "alpha = " << num(c.params.alpha) << '\n';
    out << "beta = " << num(c.params.beta) << '\n';
    out << "scheme = " << (c.scheme == schemes::SchemeKind::Linear ? "linear" : "nonlinear") << '\n';
    out << "step_mode = " << (c.control.mode == stepper::StepMode::Constant ? "constant" : "adaptive")
        << '\n';
    out << "dt = " << num(c.control.dt) << '\n';
    out << "dt_min = " << num(c.control.dt_min) << '\n';
    out << "dt_max = " << num(c.control.dt_max) << '\n';
    out << "mu = " << num(c.control.mu) << '\n';
    out << "lambda_table = ";
    for (std::size_t i = 0; i < c.control.lambda_table.size(); ++i) {
        if (i > 0) out << ", ";
        out << num(c.control.lambda_table[i].first) << ':' << num(c.control.lambda_table[i].second);
    }
    out << '\n';
    out << "uprime_window = " << c.control.uprime_window << '\n';
    out << "mu_rescale_t2 = " << (c.mu_rescale_t2 ? "true" : "false") << '\n';
    out << "t_end = " << num(c.t_end) << '\n';
    out << "seed = " << c.seed << '\n';
    out << "init_mean = " << num(c.init_mean) << '\n';
    out << "init_amp = " << num(c.init_amp) << '\n';
    out << "snapshot_times = " << join(c.snapshot_times) << '\n';
    out << "cg_tol = " << num(c.cg_tol) << '\n';
    out << "cg_tol_mode = " << (c.cg_tol_absolute ? "absolute" : "relative") << '\n';
    out << "cg_maxit = " << c.cg_maxit << '\n';
    out << "newton_tol = " << num(c.newton_tol) << '\n';
    out << "newton_maxit = " << c.newton_maxit << '\n';
    out << "fd_eps = " << num(c.fd_eps) << '\n';
    out << "band_margin = " << num(c.band_margin) << '\n';
    out << "band_policy = " << (c.band_policy == BandPolicy::Strict ? "strict" : "clamp") << '\n';
    out << "assert_stability = " << (c.assert_stability ? "true" : "false") << '\n';
    out << "bench_ref_dt = " << num(c.bench_ref_dt) << '\n';
    out << "bench_policies = ";
    for (std::size_t i = 0; i < c.bench_policies.size(); ++i) {
        if (i > 0) out << ", ";
        out << c.bench_policies[i];
    }
    out << '\n';
    out << "bench_times = " << join(c.bench_times) << '\n';
    return out.str();
}

}  // namespace mmctdgl::cli
