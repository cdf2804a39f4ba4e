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

#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <random>

#include "mmctdgl/kernels.hpp"
#include "mmctdgl/schemes.hpp"

using namespace mmctdgl;
using grid::Field2D;
using grid::Grid2D;
using physics::SimParams;
using schemes::StepOptions;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Field2D band_field(const Grid2D& g, std::uint64_t seed, double mean = 0.65, double amp = 0.05) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amp, amp);
    Field2D f(g);
    for (auto& v : f.values) v = mean + dist(rng);
    return f;
}

Field2D smooth_field(const Grid2D& g, double mean = 0.65, double amp = 0.01) {
    Field2D f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            f.at(i, j) = mean + amp * std::cos(i * g.hx) + amp * std::cos(j * g.hy);
    return f;
}

StepOptions tight_options() {
    StepOptions o;
    o.cg_tol = 1e-12;
    o.cg_absolute_tol = true;
    o.band = physics::AdmissibleBand(1e-4, 1.0 - 1e-4);
    return o;
}

Eigen::MatrixXd assemble_dense(const linsolve::LinearOperator& A, const Grid2D& g) {
    const std::size_t n = g.size();
    Eigen::MatrixXd M(n, n);
    Field2D e(g), col(g);
    for (std::size_t k = 0; k < n; ++k) {
        std::fill(e.values.begin(), e.values.end(), 0.0);
        e.values[k] = 1.0;
        A.apply(e, col);
        for (std::size_t r = 0; r < n; ++r) M(r, k) = col.values[r];
    }
    return M;
}

}  // namespace

TEST_CASE("constant fields are exact fixed points") {
    Grid2D g(16, 16, kTwoPi, kTwoPi);
    SimParams p;
    Field2D c(g, 0.65);

    SUBCASE("linearized scheme") {
        auto [next, rep] = schemes::linear_step(c, 0.01, p, tight_options());
        CHECK(std::memcmp(next.data(), c.data(), c.size() * sizeof(double)) == 0);
        CHECK(rep.solver.iterations == 0);
        CHECK(rep.l2_before == rep.l2_after);
        CHECK(rep.energy_after == physics::total_energy(c, p));
    }

    SUBCASE("midpoint scheme") {
        auto [next, rep] = schemes::nonlinear_step(c, 0.01, p, tight_options());
        CHECK(std::memcmp(next.data(), c.data(), c.size() * sizeof(double)) == 0);
        CHECK(rep.newton_iterations == 0);
        CHECK(rep.solver.iterations == 0);
    }
}

TEST_CASE("nonpositive step sizes are rejected") {
    Grid2D g(8, 8, kTwoPi, kTwoPi);
    SimParams p;
    Field2D c(g, 0.5);
    CHECK_THROWS_AS(schemes::linear_step(c, 0.0, p, tight_options()), StepError);
    CHECK_THROWS_AS(schemes::nonlinear_step(c, -0.1, p, tight_options()), StepError);
}

TEST_CASE("right-hand side equals the explicit combine written longhand") {
    Grid2D g(8, 8, kTwoPi, kTwoPi);
    SimParams p;
    auto phi = band_field(g, 3);
    const double dt = 0.004;

    Field2D b = schemes::linear_scheme_rhs(phi, dt, p);

    const std::size_t n = phi.size();
    std::vector<double> gc(n), gp(n), gx(n), gy(n), lap(n), bih(n);
    kernels::active().g_coeffs(n, phi.data(), gc.data(), gp.data(), p.kb * p.temp, p.tau,
                               p.ncoef, p.rho, p.chi);
    grid::gradient_into(phi, gx.data(), gy.data());
    grid::laplacian_into(g, phi.data(), lap.data());
    grid::laplacian_into(g, lap.data(), bih.data());

    const double inv_dt = 1.0 / dt;
    const double c1 = -(0.5 * p.m0);
    const double c2 = -(p.m0 * p.kb * p.temp * p.kcoef);
    for (std::size_t k = 0; k < n; ++k) {
        const double adv = gx[k] * gx[k] + gy[k] * gy[k];
        const double expect =
            phi.values[k] * inv_dt - c1 * (gp[k] * adv) - c1 * (gc[k] * lap[k]) + c2 * bih[k];
        CHECK(b.values[k] == expect);
    }
}

TEST_CASE("midpoint residual equals the combine written longhand") {
    Grid2D g(8, 8, kTwoPi, kTwoPi);
    SimParams p;
    auto pn = band_field(g, 5);
    auto u = band_field(g, 7);
    const double dt = 0.002;

    Field2D r = schemes::nonlinear_residual(u, pn, dt, p, StepOptions{});

    const std::size_t n = pn.size();
    std::vector<double> m(n), gm(n), gpm(n), gmx(n), gmy(n), lapn(n), lapu(n), bihn(n), bihu(n);
    for (std::size_t k = 0; k < n; ++k) m[k] = 0.5 * (u.values[k] + pn.values[k]);
    kernels::active().g_coeffs(n, m.data(), gm.data(), gpm.data(), p.kb * p.temp, p.tau, p.ncoef,
                               p.rho, p.chi);
    kernels::active().grad_x(g.nx, g.ny, g.hx, m.data(), gmx.data());
    kernels::active().grad_y(g.nx, g.ny, g.hy, m.data(), gmy.data());
    grid::laplacian_into(g, pn.data(), lapn.data());
    grid::laplacian_into(g, lapn.data(), bihn.data());
    grid::laplacian_into(g, u.data(), lapu.data());
    grid::laplacian_into(g, lapu.data(), bihu.data());

    const double inv_dt = 1.0 / dt;
    const double halfm0 = 0.5 * p.m0;
    const double ck = p.m0 * p.kb * p.temp * p.kcoef;
    for (std::size_t k = 0; k < n; ++k) {
        const double gm2 = gmx[k] * gmx[k] + gmy[k] * gmy[k];
        const double expect = (u.values[k] - pn.values[k]) * inv_dt - p.m0 * (gpm[k] * gm2) -
                              halfm0 * (gm[k] * (lapn[k] + lapu[k])) + ck * (bihu[k] + bihn[k]);
        CHECK(r.values[k] == expect);
    }
}

TEST_CASE("assembled adjoint is the exact transpose") {
    Grid2D g(8, 8, kTwoPi, kTwoPi);
    SimParams p;
    auto phi = band_field(g, 11);
    const double dt = 0.005;

    auto A = schemes::linear_scheme_operator(phi, dt, p);
    auto At = schemes::linear_scheme_adjoint(phi, dt, p);
    Eigen::MatrixXd M = assemble_dense(A, g);
    Eigen::MatrixXd Mt = assemble_dense(At, g);

    const double scale = M.cwiseAbs().maxCoeff();
    CHECK((Mt - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);

    // Inner-product form of the same statement.
    auto v = band_field(g, 13, 0.0, 1.0);
    auto w = band_field(g, 17, 0.0, 1.0);
    Field2D Av(g), Atw(g);
    A.apply(v, Av);
    At.apply(w, Atw);
    CHECK(grid::inner(Av, w) == doctest::Approx(grid::inner(v, Atw)).epsilon(1e-12));
}

TEST_CASE("one linear step matches a dense direct solve") {
    Grid2D g(8, 8, kTwoPi, kTwoPi);
    SimParams p;
    const double dt = 0.002;

    for (std::uint64_t seed : {21u, 22u, 23u}) {
        auto phi = band_field(g, seed);
        auto A = schemes::linear_scheme_operator(phi, dt, p);
        Field2D b = schemes::linear_scheme_rhs(phi, dt, p);
        Eigen::MatrixXd M = assemble_dense(A, g);
        Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
        Eigen::VectorXd xd = M.partialPivLu().solve(bv);

        auto opts = tight_options();
        opts.assert_l2 = false;  // a single rough state need not contract
        auto [x, rep] = schemes::linear_step(phi, dt, p, opts);
        CHECK(rep.solver.converged);
        double err = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k)
            err = std::max(err, std::abs(x.values[k] - xd[static_cast<Eigen::Index>(k)]));
        CAPTURE(seed);
        CHECK(err <= 1e-8);
    }
}

TEST_CASE("newton iteration satisfies the residual tolerance it reports") {
    Grid2D g(16, 16, kTwoPi, kTwoPi);
    SimParams p;
    auto phi = band_field(g, 31);
    auto opts = tight_options();
    opts.cg_tol = 1e-10;
    opts.newton_tol = 1e-9;

    auto [u, rep] = schemes::nonlinear_step(phi, 0.01, p, opts);
    CHECK(rep.newton_iterations >= 1);
    CHECK(rep.solver.final_residual_norm <= opts.newton_tol);

    Field2D r = schemes::nonlinear_residual(u, phi, 0.01, p, opts);
    CHECK(grid::l2_norm(r) <= opts.newton_tol * (1.0 + 1e-12));
}

TEST_CASE("newton converges fast on smooth states") {
    // Quadratic convergence shows up as very few iterations even from the
    // explicit-state initial guess.
    Grid2D g(16, 16, kTwoPi, kTwoPi);
    SimParams p;
    auto phi = smooth_field(g);
    auto opts = tight_options();
    opts.newton_tol = 1e-10;
    auto [u, rep] = schemes::nonlinear_step(phi, 0.005, p, opts);
    CHECK(rep.newton_iterations <= 4);
    CHECK(grid::l2_norm(u - phi) > 0.0);
}

TEST_CASE("both schemes contract the solution norm on random states") {
    Grid2D g(16, 16, kTwoPi, kTwoPi);
    SimParams p;
    auto opts = tight_options();
    opts.cg_tol = 1e-10;

    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        Field2D phi = band_field(g, seed);
        for (int s = 0; s < 3; ++s) {
            auto [next, rep] = schemes::linear_step(phi, 0.01, p, opts);
            CHECK(rep.l2_after <= rep.l2_before + 1e-12);
            phi = std::move(next);
        }
    }
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        Field2D phi = band_field(g, 100 + seed);
        for (int s = 0; s < 2; ++s) {
            auto [next, rep] = schemes::nonlinear_step(phi, 0.01, p, opts);
            CHECK(rep.l2_after <= rep.l2_before + 1e-12);
            phi = std::move(next);
        }
    }
}

TEST_CASE("step-halving defects contract at each scheme's local order") {
    Grid2D g(16, 16, kTwoPi, kTwoPi);
    SimParams p;
    auto phi = smooth_field(g);
    auto opts = tight_options();
    opts.newton_tol = 1e-12;

    const auto lin = [&](const Field2D& f, double dt) {
        return schemes::linear_step(f, dt, p, opts).first;
    };
    const auto nl = [&](const Field2D& f, double dt) {
        return schemes::nonlinear_step(f, dt, p, opts).first;
    };

    SUBCASE("one step versus two half steps, linearized scheme") {
        // Freezing the mobility coefficients at the start of the step leaves
        // a quadratic local defect, so halving shrinks the gap by four.
        double defect[2];
        double dt = 4e-3;
        for (int k = 0; k < 2; ++k, dt *= 0.5) {
            auto one = lin(phi, dt);
            auto two = lin(lin(phi, 0.5 * dt), 0.5 * dt);
            defect[k] = grid::l2_norm(one - two);
        }
        CHECK(defect[0] > 0.0);
        const double order = std::log2(defect[0] / defect[1]);
        CAPTURE(defect[0]);
        CAPTURE(defect[1]);
        CHECK(order > 1.7);
        CHECK(order < 2.4);
    }

    SUBCASE("one step versus two half steps, midpoint scheme") {
        double defect[2];
        double dt = 4e-3;
        for (int k = 0; k < 2; ++k, dt *= 0.5) {
            auto one = nl(phi, dt);
            auto two = nl(nl(phi, 0.5 * dt), 0.5 * dt);
            defect[k] = grid::l2_norm(one - two);
        }
        CHECK(defect[0] > 0.0);
        const double order = std::log2(defect[0] / defect[1]);
        CAPTURE(defect[0]);
        CAPTURE(defect[1]);
        CHECK(order > 2.5);
        CHECK(order < 3.5);
    }

    SUBCASE("the two schemes differ at second order in the step") {
        // The gap is dominated by the linearized scheme's quadratic local
        // defect; the midpoint contribution enters one order higher.
        double gap[2];
        double dt = 4e-3;
        for (int k = 0; k < 2; ++k, dt *= 0.5) {
            gap[k] = grid::l2_norm(lin(phi, dt) - nl(phi, dt));
        }
        CHECK(gap[0] > 0.0);
        const double order = std::log2(gap[0] / gap[1]);
        CAPTURE(gap[0]);
        CAPTURE(gap[1]);
        CHECK(order > 1.7);
        CHECK(order < 2.4);
    }
}

TEST_CASE("stepping commutes with grid translations up to solver tolerance") {
    Grid2D g(16, 16, kTwoPi, kTwoPi);
    SimParams p;
    auto phi = band_field(g, 41);
    auto opts = tight_options();

    auto stepped = schemes::linear_step(phi, 0.01, p, opts).first;
    auto shifted_then_stepped = schemes::linear_step(grid::shift(phi, 3, 5), 0.01, p, opts).first;
    CHECK(grid::l2_norm(grid::shift(stepped, 3, 5) - shifted_then_stepped) <= 1e-9);
}

TEST_CASE("band enforcement") {
    Grid2D g(16, 16, kTwoPi, kTwoPi);
    SimParams p;
    auto phi = band_field(g, 43, 0.65, 0.04);

    SUBCASE("strict mode fails the step when the result leaves the band") {
        auto opts = tight_options();
        opts.band = physics::AdmissibleBand(0.64, 0.66);
        opts.clamp_band = false;
        CHECK_THROWS_AS(schemes::linear_step(phi, 0.001, p, opts), StepError);
    }

    SUBCASE("clamp mode pins offending nodes and counts them") {
        auto opts = tight_options();
        opts.band = physics::AdmissibleBand(0.64, 0.66);
        opts.clamp_band = true;
        opts.assert_l2 = false;
        auto [x, rep] = schemes::linear_step(phi, 0.001, p, opts);
        CHECK(rep.band_clamped_nodes > 0);
        double mn = 0.0, mx = 0.0;
        grid::minmax(x, mn, mx);
        CHECK(mn >= 0.64);
        CHECK(mx <= 0.66);
    }

    SUBCASE("an unset band disables enforcement") {
        auto opts = tight_options();
        opts.band = physics::AdmissibleBand();
        auto [x, rep] = schemes::linear_step(phi, 0.001, p, opts);
        CHECK(rep.band_clamped_nodes == 0);
        (void)x;
    }
}
