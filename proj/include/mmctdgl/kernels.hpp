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

#include <cstddef>
#include <string>

namespace mmctdgl::kernels {

// Low-level array kernels behind the grid/scheme operators. Two lanes exist,
// a scalar reference and an AVX2 variant, selected once at startup. Every
// lane must produce bitwise identical results per element; builds therefore
// disable FP contraction and the AVX2 code uses no FMA.
//
// Reductions (dot, sums) are deliberately NOT in this table: their summation
// order is fixed to sequential row-major for determinism, so they have a
// single scalar implementation below.

struct KernelTable {
    const char* name;

    // y[k] += a * x[k]
    void (*axpy)(std::size_t n, double a, const double* x, double* y);
    // y[k] = a * x[k] + b * y[k]
    void (*axpby)(std::size_t n, double a, const double* x, double b, double* y);

    // Periodic central-difference stencils, row-major layout, index i + j*nx.
    void (*grad_x)(int nx, int ny, double hx, const double* f, double* out);
    void (*grad_y)(int nx, int ny, double hy, const double* f, double* out);
    void (*laplacian)(int nx, int ny, double hx, double hy, const double* f, double* out);

    // Pointwise coefficient fields of the dynamics:
    //   g[k]  = kbT*(1/(tau*p) + 1/(ncoef*p) + rho^2/(1-rho*p) - 2*chi*rho^2)
    //   gp[k] = kbT*(-1/(tau*p^2) - 1/(ncoef*p^2) + rho^3/(1-rho*p)^2)
    // Arithmetic order matches physics::diffusion_coeff exactly.
    void (*g_coeffs)(std::size_t n, const double* phi, double* g, double* gp,
                     double kbT, double tau, double ncoef, double rho, double chi);

    // Fused combine of the linearized one-step operator:
    //   out[k] = v[k]*inv_dt - c1*(gp[k]*(gx[k]*dxv[k] + gy[k]*dyv[k]))
    //            - c1*(g[k]*lapv[k]) + c2*bihv[k]
    void (*scheme_combine)(std::size_t n, const double* v, double inv_dt, double c1,
                           const double* gp, const double* gx, const double* gy,
                           const double* dxv, const double* dyv, const double* g,
                           const double* lapv, double c2, const double* bihv, double* out);

    // Fused combine of the midpoint scheme residual:
    //   out[k] = (u[k]-phin[k])*inv_dt - m0*(gpm[k]*(gmx[k]^2 + gmy[k]^2))
    //            - halfm0*(gm[k]*(lapn[k]+lapu[k])) + ck*(bihu[k]+bihn[k])
    void (*residual_combine)(std::size_t n, const double* u, const double* phin,
                             double inv_dt, double m0, const double* gpm,
                             const double* gmx, const double* gmy, double halfm0,
                             const double* gm, const double* lapn, const double* lapu,
                             double ck, const double* bihn, const double* bihu,
                             double* out);
};

const KernelTable& scalar_table();

// Null when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table();

// Active lane. Resolved on first use: AVX2 when available, else scalar.
// MMC_TDGL_SIMD=scalar|avx2|auto overrides.
const KernelTable& active();

// Force a lane by name ("auto", "scalar", "avx2"). Throws on an unavailable lane.
void select_lane(const std::string& name);

// Sequential row-major reduction, the one summation order every norm and
// inner product in the project uses.
double dot_seq(std::size_t n, const double* x, const double* y);
double sum_seq(std::size_t n, const double* x);
void minmax_seq(std::size_t n, const double* x, double& mn, double& mx);

// Row-parallelism cap for stencil sweeps. 0 means auto (hardware threads).
// Results are bitwise independent of the cap; rows are disjoint.
void set_thread_cap(int cap);
int thread_cap();

// Internal helper shared by the lanes: runs fn(j0, j1) over row ranges,
// possibly on several threads.
void for_rows(int ny, void* ctx, void (*fn)(void* ctx, int j0, int j1));

}  // namespace mmctdgl::kernels
