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

#include "mmctdgl/schemes.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <utility>
#include <vector>

#include "mmctdgl/errors.hpp"
#include "mmctdgl/kernels.hpp"

namespace mmctdgl::schemes {

namespace {

using grid::Grid2D;
using linsolve::LinearOperator;
using linsolve::SolveOptions;
using linsolve::SolveStats;

// Everything the linearized scheme evaluates at phi_n, computed once per step
// and shared by the operator, its adjoint and the right-hand side.
struct LinearCtx {
    Grid2D g;
    double inv_dt = 0.0;
    double c1 = 0.0;  // m0/2, on the advective and Laplacian terms
    double c2 = 0.0;  // m0*kb*temp*kcoef, on the biharmonic term
    std::vector<double> gc, gp;        // G(phi_n), G'(phi_n)
    std::vector<double> gx, gy;        // grad phi_n
    std::vector<double> lap_n, bih_n;  // lap phi_n, lap(lap phi_n)

    // Scratch for one operator application; the solvers are sequential.
    mutable std::vector<double> dxv, dyv, lapv, bihv, tx, ty;
};

std::shared_ptr<LinearCtx> make_linear_ctx(const Field2D& phi_n, double dt, const SimParams& p) {
    auto ctx = std::make_shared<LinearCtx>();
    const std::size_t n = phi_n.size();
    ctx->g = phi_n.grid;
    ctx->inv_dt = 1.0 / dt;
    ctx->c1 = 0.5 * p.m0;
    ctx->c2 = p.m0 * p.kb * p.temp * p.kcoef;
    ctx->gc.resize(n);
    ctx->gp.resize(n);
    ctx->gx.resize(n);
    ctx->gy.resize(n);
    ctx->lap_n.resize(n);
    ctx->bih_n.resize(n);
    ctx->dxv.resize(n);
    ctx->dyv.resize(n);
    ctx->lapv.resize(n);
    ctx->bihv.resize(n);
    ctx->tx.resize(n);
    ctx->ty.resize(n);

    const kernels::KernelTable& k = kernels::active();
    k.g_coeffs(n, phi_n.data(), ctx->gc.data(), ctx->gp.data(), p.kb * p.temp, p.tau, p.ncoef,
               p.rho, p.chi);
    grid::gradient_into(phi_n, ctx->gx.data(), ctx->gy.data());
    grid::laplacian_into(ctx->g, phi_n.data(), ctx->lap_n.data());
    grid::laplacian_into(ctx->g, ctx->lap_n.data(), ctx->bih_n.data());
    return ctx;
}

LinearOperator operator_from_ctx(std::shared_ptr<const LinearCtx> ctx) {
    LinearOperator A;
    // The advective term makes the operator mildly nonsymmetric.
    A.symmetric_hint = false;
    A.apply = [ctx](const Field2D& in, Field2D& out) {
        const std::size_t n = in.size();
        const kernels::KernelTable& k = kernels::active();
        k.grad_x(ctx->g.nx, ctx->g.ny, ctx->g.hx, in.data(), ctx->dxv.data());
        k.grad_y(ctx->g.nx, ctx->g.ny, ctx->g.hy, in.data(), ctx->dyv.data());
        k.laplacian(ctx->g.nx, ctx->g.ny, ctx->g.hx, ctx->g.hy, in.data(), ctx->lapv.data());
        k.laplacian(ctx->g.nx, ctx->g.ny, ctx->g.hx, ctx->g.hy, ctx->lapv.data(), ctx->bihv.data());
        k.scheme_combine(n, in.data(), ctx->inv_dt, ctx->c1, ctx->gp.data(), ctx->gx.data(),
                         ctx->gy.data(), ctx->dxv.data(), ctx->dyv.data(), ctx->gc.data(),
                         ctx->lapv.data(), ctx->c2, ctx->bihv.data(), out.data());
    };
    return A;
}

LinearOperator adjoint_from_ctx(std::shared_ptr<const LinearCtx> ctx) {
    LinearOperator At;
    At.symmetric_hint = false;
    // Central differences transpose to their negation and the Laplacian to
    // itself, so the transpose moves the coefficient fields inside the
    // derivatives:
    //   At w = w/dt + c1*[Dx(gp*gx*w) + Dy(gp*gy*w)] - c1*lap(gc*w) + c2*bih w
    At.apply = [ctx](const Field2D& in, Field2D& out) {
        const std::size_t n = in.size();
        const kernels::KernelTable& k = kernels::active();
        const double* w = in.data();
        for (std::size_t i = 0; i < n; ++i) {
            ctx->tx[i] = ctx->gp[i] * ctx->gx[i] * w[i];
            ctx->ty[i] = ctx->gp[i] * ctx->gy[i] * w[i];
        }
        k.grad_x(ctx->g.nx, ctx->g.ny, ctx->g.hx, ctx->tx.data(), ctx->dxv.data());
        k.grad_y(ctx->g.nx, ctx->g.ny, ctx->g.hy, ctx->ty.data(), ctx->dyv.data());
        for (std::size_t i = 0; i < n; ++i) {
            ctx->tx[i] = ctx->gc[i] * w[i];
        }
        k.laplacian(ctx->g.nx, ctx->g.ny, ctx->g.hx, ctx->g.hy, ctx->tx.data(), ctx->lapv.data());
        k.laplacian(ctx->g.nx, ctx->g.ny, ctx->g.hx, ctx->g.hy, w, ctx->ty.data());
        k.laplacian(ctx->g.nx, ctx->g.ny, ctx->g.hx, ctx->g.hy, ctx->ty.data(), ctx->bihv.data());
        double* o = out.data();
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = w[i] * ctx->inv_dt + ctx->c1 * (ctx->dxv[i] + ctx->dyv[i]) -
                   ctx->c1 * ctx->lapv[i] + ctx->c2 * ctx->bihv[i];
        }
    };
    return At;
}

Field2D rhs_from_ctx(const Field2D& phi_n, const LinearCtx& ctx) {
    // The explicit half of the split is the operator combine with both
    // coefficient signs flipped, evaluated at phi_n itself; sign flips are
    // exact so this is bitwise the stated right-hand side.
    Field2D b(phi_n.grid);
    kernels::active().scheme_combine(phi_n.size(), phi_n.data(), ctx.inv_dt, -ctx.c1,
                                     ctx.gp.data(), ctx.gx.data(), ctx.gy.data(), ctx.gx.data(),
                                     ctx.gy.data(), ctx.gc.data(), ctx.lap_n.data(), -ctx.c2,
                                     ctx.bih_n.data(), b.data());
    return b;
}

// Band with lo >= hi means no enforcement was configured.
bool band_is_set(const AdmissibleBand& band) { return band.lo < band.hi; }

int enforce_band(Field2D& f, const AdmissibleBand& band, bool clamp) {
    if (!band_is_set(band)) return 0;
    double mn = 0.0, mx = 0.0;
    grid::minmax(f, mn, mx);
    if (mn > band.lo && mx < band.hi) return 0;
    if (!clamp) {
        std::ostringstream msg;
        msg << "field left the admissible band (" << band.lo << ", " << band.hi
            << "): min=" << mn << " max=" << mx;
        throw StepError(msg.str());
    }
    int clamped = 0;
    for (double& v : f.values) {
        if (v <= band.lo) {
            v = band.lo;
            ++clamped;
        } else if (v >= band.hi) {
            v = band.hi;
            ++clamped;
        }
    }
    return clamped;
}

void check_l2_contraction(double before, double after) {
    if (after > before + 1e-12) {
        std::ostringstream msg;
        msg << "step increased the solution norm: " << before << " -> " << after;
        throw StepError(msg.str());
    }
}

SolveOptions solve_options(const StepOptions& opts) {
    SolveOptions s;
    s.tol = opts.cg_tol;
    s.absolute_tol = opts.cg_absolute_tol;
    s.maxit = opts.cg_maxit;
    return s;
}

}  // namespace

LinearOperator linear_scheme_operator(const Field2D& phi_n, double dt, const SimParams& p) {
    return operator_from_ctx(make_linear_ctx(phi_n, dt, p));
}

LinearOperator linear_scheme_adjoint(const Field2D& phi_n, double dt, const SimParams& p) {
    return adjoint_from_ctx(make_linear_ctx(phi_n, dt, p));
}

Field2D linear_scheme_rhs(const Field2D& phi_n, double dt, const SimParams& p) {
    return rhs_from_ctx(phi_n, *make_linear_ctx(phi_n, dt, p));
}

std::pair<Field2D, StepReport> linear_step(const Field2D& phi_n, double dt, const SimParams& p,
                                           const StepOptions& opts) {
    if (!(dt > 0.0)) throw StepError("step size must be positive, got " + std::to_string(dt));
    StepReport rep;
    rep.l2_before = grid::l2_norm(phi_n);

    std::shared_ptr<const LinearCtx> ctx = make_linear_ctx(phi_n, dt, p);
    const LinearOperator A = operator_from_ctx(ctx);
    const Field2D b = rhs_from_ctx(phi_n, *ctx);
    const SolveOptions sopts = solve_options(opts);

    Field2D x(phi_n.grid);
    try {
        auto [sol, stats] = linsolve::cg(A, b, phi_n, sopts);
        x = std::move(sol);
        rep.solver = stats;
    } catch (const SolveError& primary) {
        // The operator is only near-symmetric; when plain CG gives up, solve
        // the normal equations with the exact adjoint instead.
        const LinearOperator At = adjoint_from_ctx(ctx);
        auto [sol, stats] = linsolve::cgnr(A, At, b, phi_n, sopts);
        x = std::move(sol);
        rep.solver = stats;
        rep.solver.iterations += primary.stats.iterations;
        rep.solver.fallback_used = true;
    }

    rep.band_clamped_nodes = enforce_band(x, opts.band, opts.clamp_band);
    rep.l2_after = grid::l2_norm(x);
    if (opts.assert_l2) check_l2_contraction(rep.l2_before, rep.l2_after);
    if (opts.compute_energy) rep.energy_after = physics::total_energy(x, p);
    return {std::move(x), rep};
}

Field2D nonlinear_residual(const Field2D& phi_next, const Field2D& phi_n, double dt,
                           const SimParams& p, const StepOptions&) {
    const std::size_t n = phi_n.size();
    const Grid2D& g = phi_n.grid;
    const kernels::KernelTable& k = kernels::active();

    std::vector<double> m(n), gm(n), gpm(n), gmx(n), gmy(n), lap_n(n), lap_u(n), bih_n(n), bih_u(n);
    const double* u = phi_next.data();
    const double* pn = phi_n.data();
    for (std::size_t i = 0; i < n; ++i) m[i] = 0.5 * (u[i] + pn[i]);

    k.g_coeffs(n, m.data(), gm.data(), gpm.data(), p.kb * p.temp, p.tau, p.ncoef, p.rho, p.chi);
    k.grad_x(g.nx, g.ny, g.hx, m.data(), gmx.data());
    k.grad_y(g.nx, g.ny, g.hy, m.data(), gmy.data());
    k.laplacian(g.nx, g.ny, g.hx, g.hy, pn, lap_n.data());
    k.laplacian(g.nx, g.ny, g.hx, g.hy, lap_n.data(), bih_n.data());
    k.laplacian(g.nx, g.ny, g.hx, g.hy, u, lap_u.data());
    k.laplacian(g.nx, g.ny, g.hx, g.hy, lap_u.data(), bih_u.data());

    Field2D out(g);
    k.residual_combine(n, u, pn, 1.0 / dt, p.m0, gpm.data(), gmx.data(), gmy.data(), 0.5 * p.m0,
                       gm.data(), lap_n.data(), lap_u.data(), p.m0 * p.kb * p.temp * p.kcoef,
                       bih_n.data(), bih_u.data(), out.data());
    return out;
}

std::pair<Field2D, StepReport> nonlinear_step(const Field2D& phi_n, double dt, const SimParams& p,
                                              const StepOptions& opts) {
    if (!(dt > 0.0)) throw StepError("step size must be positive, got " + std::to_string(dt));
    StepReport rep;
    rep.l2_before = grid::l2_norm(phi_n);

    const std::size_t n = phi_n.size();
    const Grid2D& g = phi_n.grid;
    const kernels::KernelTable& k = kernels::active();
    const double inv_dt = 1.0 / dt;
    const double halfm0 = 0.5 * p.m0;
    const double ck = p.m0 * p.kb * p.temp * p.kcoef;
    const double cap = 1.0 / p.rho;

    // phi_n enters every residual; its stencils are frozen here.
    std::vector<double> lap_n(n), bih_n(n);
    k.laplacian(g.nx, g.ny, g.hx, g.hy, phi_n.data(), lap_n.data());
    k.laplacian(g.nx, g.ny, g.hx, g.hy, lap_n.data(), bih_n.data());

    std::vector<double> m(n), gm(n), gpm(n), gmx(n), gmy(n), lap_u(n), bih_u(n);
    const auto residual = [&](const Field2D& u_field, Field2D& out) {
        const double* u = u_field.data();
        const double* pn = phi_n.data();
        for (std::size_t i = 0; i < n; ++i) m[i] = 0.5 * (u[i] + pn[i]);
        k.g_coeffs(n, m.data(), gm.data(), gpm.data(), p.kb * p.temp, p.tau, p.ncoef, p.rho,
                   p.chi);
        k.grad_x(g.nx, g.ny, g.hx, m.data(), gmx.data());
        k.grad_y(g.nx, g.ny, g.hy, m.data(), gmy.data());
        k.laplacian(g.nx, g.ny, g.hx, g.hy, u, lap_u.data());
        k.laplacian(g.nx, g.ny, g.hx, g.hy, lap_u.data(), bih_u.data());
        k.residual_combine(n, u, pn, inv_dt, p.m0, gpm.data(), gmx.data(), gmy.data(), halfm0,
                           gm.data(), lap_n.data(), lap_u.data(), ck, bih_n.data(), bih_u.data(),
                           out.data());
    };

    Field2D u = phi_n;
    Field2D R(g);
    residual(u, R);
    double rnorm = grid::l2_norm(R);

    SolveOptions inner = solve_options(opts);
    inner.absolute_tol = true;

    int total_inner = 0;
    SolveStats last_stats;
    last_stats.converged = true;
    for (int it = 1; it <= opts.newton_maxit && rnorm > opts.newton_tol; ++it) {
        LinearOperator J;
        J.apply = [&](const Field2D& v, Field2D& out) {
            out = linsolve::jacobian_vector(residual, u, v, opts.fd_eps);
        };
        // Loose inner solves are enough far from the root; the floor keeps
        // the last solve from chasing noise below the Newton tolerance.
        inner.tol = std::max(1e-6 * rnorm, 0.1 * opts.newton_tol);

        const Field2D minus_r = grid::scaled(R, -1.0);
        Field2D d(g);
        try {
            auto [sol, stats] = linsolve::cg(J, minus_r, Field2D(g), inner);
            d = std::move(sol);
            last_stats = stats;
        } catch (const SolveError& e) {
            std::ostringstream msg;
            msg << "inner linear solve failed in Newton iteration " << it << ": " << e.what();
            throw StepError(msg.str());
        }
        total_inner += last_stats.iterations;
        rep.newton_iterations = it;

        k.axpy(n, 1.0, d.data(), u.data());
        double mn = 0.0, mx = 0.0;
        grid::minmax(u, mn, mx);
        if (!(mn > 0.0) || !(mx < cap)) {
            std::ostringstream msg;
            msg << "Newton iterate left the model domain (0, " << cap << "): min=" << mn
                << " max=" << mx;
            throw StepError(msg.str());
        }

        residual(u, R);
        rnorm = grid::l2_norm(R);
        if (grid::l2_norm(d) <= 1e-12) break;
    }
    if (rnorm > opts.newton_tol && rep.newton_iterations >= opts.newton_maxit) {
        std::ostringstream msg;
        msg << "Newton did not reach tolerance " << opts.newton_tol << " in " << opts.newton_maxit
            << " iterations; residual " << rnorm;
        throw StepError(msg.str());
    }

    rep.solver = last_stats;
    rep.solver.iterations = total_inner;
    rep.solver.final_residual_norm = rnorm;

    rep.band_clamped_nodes = enforce_band(u, opts.band, opts.clamp_band);
    rep.l2_after = grid::l2_norm(u);
    if (opts.assert_l2) check_l2_contraction(rep.l2_before, rep.l2_after);
    if (opts.compute_energy) rep.energy_after = physics::total_energy(u, p);
    return {std::move(u), rep};
}

}  // namespace mmctdgl::schemes
