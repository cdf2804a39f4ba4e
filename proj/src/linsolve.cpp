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

#include "mmctdgl/linsolve.hpp"

#include <cmath>
#include <sstream>

#include "mmctdgl/errors.hpp"
#include "mmctdgl/kernels.hpp"

namespace mmctdgl::linsolve {

namespace {

// Recurrence dot products are raw sequential sums; only convergence tests
// weight by the cell area, computed exactly as grid::l2_norm does.
double raw_dot(const Field2D& a, const Field2D& b) {
    return kernels::dot_seq(a.size(), a.data(), b.data());
}

double weighted_norm(double raw_self_dot, double area) { return std::sqrt(raw_self_dot * area); }

SolveStatsSnapshot snapshot(const SolveStats& s) {
    return SolveStatsSnapshot{s.iterations, s.final_residual_norm, s.converged, s.fallback_used};
}

[[noreturn]] void fail(const char* what, const SolveStats& s, double threshold) {
    std::ostringstream msg;
    msg << what << " after " << s.iterations << " iterations; residual " << s.final_residual_norm
        << ", threshold " << threshold;
    throw SolveError(msg.str(), snapshot(s));
}

struct StagnationGuard {
    double best = 0.0;
    bool seeded = false;
    int stalls = 0;

    // True residual refreshes must keep improving; three refresh intervals
    // with no progress at all means round-off has taken over.
    bool stalled(double true_norm) {
        if (!seeded || true_norm < best) {
            best = true_norm;
            seeded = true;
            stalls = 0;
            return false;
        }
        return ++stalls >= 3;
    }
};

void apply_residual(const LinearOperator& A, const Field2D& b, const Field2D& x, Field2D& scratch,
                    Field2D& r) {
    A.apply(x, scratch);
    r = b;
    kernels::active().axpy(r.size(), -1.0, scratch.data(), r.data());
}

}  // namespace

std::pair<Field2D, SolveStats> cg(const LinearOperator& A, const Field2D& b, const Field2D& x0,
                                  const SolveOptions& opts) {
    const std::size_t n = b.size();
    const double area = b.grid.cell_area();
    const int maxit = opts.maxit > 0 ? opts.maxit : static_cast<int>(10 * n);
    const double bnorm = weighted_norm(raw_dot(b, b), area);
    const double threshold = opts.absolute_tol ? opts.tol : opts.tol * std::max(1.0, bnorm);
    const kernels::KernelTable& k = kernels::active();

    Field2D x = x0;
    Field2D r(b.grid), w(b.grid), scratch(b.grid);
    apply_residual(A, b, x, scratch, r);
    double rr = raw_dot(r, r);

    SolveStats stats;
    stats.final_residual_norm = weighted_norm(rr, area);
    if (stats.final_residual_norm <= threshold) {
        stats.converged = true;
        return {std::move(x), stats};
    }

    Field2D p = r;
    StagnationGuard guard;
    for (int it = 1; it <= maxit; ++it) {
        stats.iterations = it;
        A.apply(p, w);
        const double pw = raw_dot(p, w);
        if (!(pw > 0.0)) {
            stats.final_residual_norm = weighted_norm(rr, area);
            fail("conjugate gradient hit a nonpositive curvature direction", stats, threshold);
        }
        const double alpha = rr / pw;
        k.axpy(n, alpha, p.data(), x.data());

        bool r_is_true = false;
        if (opts.recompute_interval > 0 && it % opts.recompute_interval == 0) {
            apply_residual(A, b, x, scratch, r);
            r_is_true = true;
        } else {
            k.axpy(n, -alpha, w.data(), r.data());
        }
        double rr_new = raw_dot(r, r);
        double rnorm = weighted_norm(rr_new, area);

        if (rnorm <= threshold || r_is_true) {
            if (!r_is_true) {
                apply_residual(A, b, x, scratch, r);
                rr_new = raw_dot(r, r);
                rnorm = weighted_norm(rr_new, area);
            }
            if (rnorm <= threshold) {
                stats.converged = true;
                stats.final_residual_norm = rnorm;
                return {std::move(x), stats};
            }
            stats.final_residual_norm = rnorm;
            if (guard.stalled(rnorm)) {
                fail("conjugate gradient stagnated", stats, threshold);
            }
        }

        const double beta = rr_new / rr;
        k.axpby(n, 1.0, r.data(), beta, p.data());
        rr = rr_new;
        stats.final_residual_norm = weighted_norm(rr, area);
    }
    fail("conjugate gradient did not converge", stats, threshold);
}

std::pair<Field2D, SolveStats> cgnr(const LinearOperator& A, const LinearOperator& At,
                                    const Field2D& b, const Field2D& x0, const SolveOptions& opts) {
    const std::size_t n = b.size();
    const double area = b.grid.cell_area();
    const int maxit = opts.maxit > 0 ? opts.maxit : static_cast<int>(10 * n);
    const double bnorm = weighted_norm(raw_dot(b, b), area);
    const double threshold = opts.absolute_tol ? opts.tol : opts.tol * std::max(1.0, bnorm);
    const kernels::KernelTable& k = kernels::active();

    Field2D x = x0;
    Field2D r(b.grid), z(b.grid), w(b.grid), scratch(b.grid);
    apply_residual(A, b, x, scratch, r);
    double rr = raw_dot(r, r);

    SolveStats stats;
    stats.final_residual_norm = weighted_norm(rr, area);
    if (stats.final_residual_norm <= threshold) {
        stats.converged = true;
        return {std::move(x), stats};
    }

    At.apply(r, z);
    double zz = raw_dot(z, z);
    Field2D p = z;
    StagnationGuard guard;
    for (int it = 1; it <= maxit; ++it) {
        stats.iterations = it;
        A.apply(p, w);
        const double ww = raw_dot(w, w);
        if (!(ww > 0.0)) {
            fail("normal-equation gradient hit a null direction", stats, threshold);
        }
        const double alpha = zz / ww;
        k.axpy(n, alpha, p.data(), x.data());

        bool r_is_true = false;
        if (opts.recompute_interval > 0 && it % opts.recompute_interval == 0) {
            apply_residual(A, b, x, scratch, r);
            r_is_true = true;
        } else {
            k.axpy(n, -alpha, w.data(), r.data());
        }
        double rr_new = raw_dot(r, r);
        double rnorm = weighted_norm(rr_new, area);

        if (rnorm <= threshold || r_is_true) {
            if (!r_is_true) {
                apply_residual(A, b, x, scratch, r);
                rr_new = raw_dot(r, r);
                rnorm = weighted_norm(rr_new, area);
            }
            if (rnorm <= threshold) {
                stats.converged = true;
                stats.final_residual_norm = rnorm;
                return {std::move(x), stats};
            }
            stats.final_residual_norm = rnorm;
            if (guard.stalled(rnorm)) {
                fail("normal-equation gradient stagnated", stats, threshold);
            }
        }

        At.apply(r, z);
        const double zz_new = raw_dot(z, z);
        const double beta = zz_new / zz;
        k.axpby(n, 1.0, z.data(), beta, p.data());
        zz = zz_new;
        rr = rr_new;
        stats.final_residual_norm = weighted_norm(rr, area);
    }
    fail("normal-equation gradient did not converge", stats, threshold);
}

Field2D jacobian_vector(const std::function<void(const Field2D&, Field2D&)>& R, const Field2D& x,
                        const Field2D& v, double eps) {
    const std::size_t n = x.size();
    const kernels::KernelTable& k = kernels::active();
    const double xn = grid::l2_norm(x);
    const double vn = grid::l2_norm(v);
    const double e = (xn > 0.0 && vn > 0.0) ? eps * xn / vn : eps;

    Field2D xp = x;
    k.axpy(n, e, v.data(), xp.data());
    Field2D xm = x;
    k.axpy(n, -e, v.data(), xm.data());

    Field2D rp(x.grid), rm(x.grid);
    R(xp, rp);
    R(xm, rm);

    Field2D out(x.grid);
    const double te = 2.0 * e;
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = (rp.values[i] - rm.values[i]) / te;
    }
    return out;
}

}  // namespace mmctdgl::linsolve
