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

// Reference lane. The arithmetic order written here is the contract: the
// AVX2 lane and the brute-force test oracles must reproduce it bitwise.

#include "mmctdgl/kernels.hpp"

namespace mmctdgl::kernels {

namespace {

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
    for (std::size_t k = 0; k < n; ++k) y[k] = y[k] + a * x[k];
}

void axpby_scalar(std::size_t n, double a, const double* x, double b, double* y) {
    for (std::size_t k = 0; k < n; ++k) y[k] = a * x[k] + b * y[k];
}

struct GradXCtx {
    int nx;
    double tx;  // 2*hx
    const double* f;
    double* out;
};

void grad_x_rows(void* ctx, int j0, int j1) {
    const GradXCtx& c = *static_cast<GradXCtx*>(ctx);
    const int nx = c.nx;
    for (int j = j0; j < j1; ++j) {
        const double* row = c.f + static_cast<std::size_t>(j) * nx;
        double* o = c.out + static_cast<std::size_t>(j) * nx;
        o[0] = (row[1] - row[nx - 1]) / c.tx;
        for (int i = 1; i < nx - 1; ++i) o[i] = (row[i + 1] - row[i - 1]) / c.tx;
        o[nx - 1] = (row[0] - row[nx - 2]) / c.tx;
    }
}

void grad_x_scalar(int nx, int ny, double hx, const double* f, double* out) {
    GradXCtx c{nx, 2.0 * hx, f, out};
    for_rows(ny, &c, grad_x_rows);
}

struct GradYCtx {
    int nx, ny;
    double ty;  // 2*hy
    const double* f;
    double* out;
};

void grad_y_rows(void* ctx, int j0, int j1) {
    const GradYCtx& c = *static_cast<GradYCtx*>(ctx);
    const int nx = c.nx;
    for (int j = j0; j < j1; ++j) {
        const int jn = (j + 1 == c.ny) ? 0 : j + 1;
        const int js = (j == 0) ? c.ny - 1 : j - 1;
        const double* up = c.f + static_cast<std::size_t>(jn) * nx;
        const double* dn = c.f + static_cast<std::size_t>(js) * nx;
        double* o = c.out + static_cast<std::size_t>(j) * nx;
        for (int i = 0; i < nx; ++i) o[i] = (up[i] - dn[i]) / c.ty;
    }
}

void grad_y_scalar(int nx, int ny, double hy, const double* f, double* out) {
    GradYCtx c{nx, ny, 2.0 * hy, f, out};
    for_rows(ny, &c, grad_y_rows);
}

struct LapCtx {
    int nx, ny;
    double cx, cy;  // hx*hx, hy*hy
    const double* f;
    double* out;
};

void lap_rows(void* ctx, int j0, int j1) {
    const LapCtx& c = *static_cast<LapCtx*>(ctx);
    const int nx = c.nx;
    for (int j = j0; j < j1; ++j) {
        const int jn = (j + 1 == c.ny) ? 0 : j + 1;
        const int js = (j == 0) ? c.ny - 1 : j - 1;
        const double* row = c.f + static_cast<std::size_t>(j) * nx;
        const double* up = c.f + static_cast<std::size_t>(jn) * nx;
        const double* dn = c.f + static_cast<std::size_t>(js) * nx;
        double* o = c.out + static_cast<std::size_t>(j) * nx;
        o[0] = (row[1] - 2.0 * row[0] + row[nx - 1]) / c.cx + (up[0] - 2.0 * row[0] + dn[0]) / c.cy;
        for (int i = 1; i < nx - 1; ++i) {
            o[i] = (row[i + 1] - 2.0 * row[i] + row[i - 1]) / c.cx + (up[i] - 2.0 * row[i] + dn[i]) / c.cy;
        }
        o[nx - 1] =
            (row[0] - 2.0 * row[nx - 1] + row[nx - 2]) / c.cx + (up[nx - 1] - 2.0 * row[nx - 1] + dn[nx - 1]) / c.cy;
    }
}

void laplacian_scalar(int nx, int ny, double hx, double hy, const double* f, double* out) {
    LapCtx c{nx, ny, hx * hx, hy * hy, f, out};
    for_rows(ny, &c, lap_rows);
}

void g_coeffs_scalar(std::size_t n, const double* phi, double* g, double* gp, double kbT,
                     double tau, double ncoef, double rho, double chi) {
    const double rr = rho * rho;
    const double r3 = rho * rho * rho;
    const double c2 = 2.0 * chi * rho * rho;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = phi[k];
        const double om = 1.0 - rho * p;
        const double p2 = p * p;
        g[k] = kbT * (1.0 / (tau * p) + 1.0 / (ncoef * p) + rr / om - c2);
        gp[k] = kbT * (-1.0 / (tau * p2) - 1.0 / (ncoef * p2) + r3 / (om * om));
    }
}

struct CombineCtx {
    int nx;
    const double *v, *gp, *gx, *gy, *dxv, *dyv, *g, *lapv, *bihv;
    double inv_dt, c1, c2;
    double* out;
};

void combine_rows(void* ctx, int j0, int j1) {
    const CombineCtx& c = *static_cast<CombineCtx*>(ctx);
    const std::size_t k0 = static_cast<std::size_t>(j0) * c.nx;
    const std::size_t k1 = static_cast<std::size_t>(j1) * c.nx;
    for (std::size_t k = k0; k < k1; ++k) {
        const double adv = c.gx[k] * c.dxv[k] + c.gy[k] * c.dyv[k];
        c.out[k] = c.v[k] * c.inv_dt - c.c1 * (c.gp[k] * adv) - c.c1 * (c.g[k] * c.lapv[k]) + c.c2 * c.bihv[k];
    }
}

void scheme_combine_scalar(std::size_t n, const double* v, double inv_dt, double c1,
                           const double* gp, const double* gx, const double* gy,
                           const double* dxv, const double* dyv, const double* g,
                           const double* lapv, double c2, const double* bihv, double* out) {
    CombineCtx c{1, v, gp, gx, gy, dxv, dyv, g, lapv, bihv, inv_dt, c1, c2, out};
    for_rows(static_cast<int>(n), &c, combine_rows);
}

struct ResidCtx {
    int nx;
    const double *u, *phin, *gpm, *gmx, *gmy, *gm, *lapn, *lapu, *bihn, *bihu;
    double inv_dt, m0, halfm0, ck;
    double* out;
};

void resid_rows(void* ctx, int j0, int j1) {
    const ResidCtx& c = *static_cast<ResidCtx*>(ctx);
    const std::size_t k0 = static_cast<std::size_t>(j0) * c.nx;
    const std::size_t k1 = static_cast<std::size_t>(j1) * c.nx;
    for (std::size_t k = k0; k < k1; ++k) {
        const double gm2 = c.gmx[k] * c.gmx[k] + c.gmy[k] * c.gmy[k];
        c.out[k] = (c.u[k] - c.phin[k]) * c.inv_dt - c.m0 * (c.gpm[k] * gm2) -
                   c.halfm0 * (c.gm[k] * (c.lapn[k] + c.lapu[k])) + c.ck * (c.bihu[k] + c.bihn[k]);
    }
}

void residual_combine_scalar(std::size_t n, const double* u, const double* phin, double inv_dt,
                             double m0, const double* gpm, const double* gmx, const double* gmy,
                             double halfm0, const double* gm, const double* lapn,
                             const double* lapu, double ck, const double* bihn,
                             const double* bihu, double* out) {
    ResidCtx c{1, u, phin, gpm, gmx, gmy, gm, lapn, lapu, bihn, bihu, inv_dt, m0, halfm0, ck, out};
    for_rows(static_cast<int>(n), &c, resid_rows);
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t = {
        "scalar",
        axpy_scalar,
        axpby_scalar,
        grad_x_scalar,
        grad_y_scalar,
        laplacian_scalar,
        g_coeffs_scalar,
        scheme_combine_scalar,
        residual_combine_scalar,
    };
    return t;
}

double dot_seq(std::size_t n, const double* x, const double* y) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += x[k] * y[k];
    return s;
}

double sum_seq(std::size_t n, const double* x) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += x[k];
    return s;
}

void minmax_seq(std::size_t n, const double* x, double& mn, double& mx) {
    mn = x[0];
    mx = x[0];
    for (std::size_t k = 1; k < n; ++k) {
        if (x[k] < mn) mn = x[k];
        if (x[k] > mx) mx = x[k];
    }
}

}  // namespace mmctdgl::kernels
