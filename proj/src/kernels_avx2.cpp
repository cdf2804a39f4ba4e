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

// AVX2 lane. Only add/sub/mul/div intrinsics appear here; no FMA, so every
// element goes through the same IEEE operations as the scalar lane and the
// two lanes agree bitwise. Scalar tails repeat the reference expressions
// verbatim.

#include "mmctdgl/kernels.hpp"

#if defined(MMC_TDGL_HAVE_AVX2)

#include <immintrin.h>

namespace mmctdgl::kernels {

namespace {

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d vx = _mm256_loadu_pd(x + k);
        const __m256d vy = _mm256_loadu_pd(y + k);
        _mm256_storeu_pd(y + k, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (; k < n; ++k) y[k] = y[k] + a * x[k];
}

void axpby_avx2(std::size_t n, double a, const double* x, double b, double* y) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d vx = _mm256_loadu_pd(x + k);
        const __m256d vy = _mm256_loadu_pd(y + k);
        _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_mul_pd(va, vx), _mm256_mul_pd(vb, vy)));
    }
    for (; k < n; ++k) y[k] = a * x[k] + b * y[k];
}

struct GradXCtx {
    int nx;
    double tx;
    const double* f;
    double* out;
};

void grad_x_rows(void* ctx, int j0, int j1) {
    const GradXCtx& c = *static_cast<GradXCtx*>(ctx);
    const int nx = c.nx;
    const __m256d vtx = _mm256_set1_pd(c.tx);
    for (int j = j0; j < j1; ++j) {
        const double* row = c.f + static_cast<std::size_t>(j) * nx;
        double* o = c.out + static_cast<std::size_t>(j) * nx;
        o[0] = (row[1] - row[nx - 1]) / c.tx;
        int i = 1;
        for (; i + 4 <= nx - 1; i += 4) {
            const __m256d e = _mm256_loadu_pd(row + i + 1);
            const __m256d w = _mm256_loadu_pd(row + i - 1);
            _mm256_storeu_pd(o + i, _mm256_div_pd(_mm256_sub_pd(e, w), vtx));
        }
        for (; i < nx - 1; ++i) o[i] = (row[i + 1] - row[i - 1]) / c.tx;
        o[nx - 1] = (row[0] - row[nx - 2]) / c.tx;
    }
}

void grad_x_avx2(int nx, int ny, double hx, const double* f, double* out) {
    GradXCtx c{nx, 2.0 * hx, f, out};
    for_rows(ny, &c, grad_x_rows);
}

struct GradYCtx {
    int nx, ny;
    double ty;
    const double* f;
    double* out;
};

void grad_y_rows(void* ctx, int j0, int j1) {
    const GradYCtx& c = *static_cast<GradYCtx*>(ctx);
    const int nx = c.nx;
    const __m256d vty = _mm256_set1_pd(c.ty);
    for (int j = j0; j < j1; ++j) {
        const int jn = (j + 1 == c.ny) ? 0 : j + 1;
        const int js = (j == 0) ? c.ny - 1 : j - 1;
        const double* up = c.f + static_cast<std::size_t>(jn) * nx;
        const double* dn = c.f + static_cast<std::size_t>(js) * nx;
        double* o = c.out + static_cast<std::size_t>(j) * nx;
        int i = 0;
        for (; i + 4 <= nx; i += 4) {
            const __m256d u = _mm256_loadu_pd(up + i);
            const __m256d d = _mm256_loadu_pd(dn + i);
            _mm256_storeu_pd(o + i, _mm256_div_pd(_mm256_sub_pd(u, d), vty));
        }
        for (; i < nx; ++i) o[i] = (up[i] - dn[i]) / c.ty;
    }
}

void grad_y_avx2(int nx, int ny, double hy, const double* f, double* out) {
    GradYCtx c{nx, ny, 2.0 * hy, f, out};
    for_rows(ny, &c, grad_y_rows);
}

struct LapCtx {
    int nx, ny;
    double cx, cy;
    const double* f;
    double* out;
};

void lap_rows(void* ctx, int j0, int j1) {
    const LapCtx& c = *static_cast<LapCtx*>(ctx);
    const int nx = c.nx;
    const __m256d vcx = _mm256_set1_pd(c.cx);
    const __m256d vcy = _mm256_set1_pd(c.cy);
    const __m256d two = _mm256_set1_pd(2.0);
    for (int j = j0; j < j1; ++j) {
        const int jn = (j + 1 == c.ny) ? 0 : j + 1;
        const int js = (j == 0) ? c.ny - 1 : j - 1;
        const double* row = c.f + static_cast<std::size_t>(j) * nx;
        const double* up = c.f + static_cast<std::size_t>(jn) * nx;
        const double* dn = c.f + static_cast<std::size_t>(js) * nx;
        double* o = c.out + static_cast<std::size_t>(j) * nx;
        o[0] = (row[1] - 2.0 * row[0] + row[nx - 1]) / c.cx + (up[0] - 2.0 * row[0] + dn[0]) / c.cy;
        int i = 1;
        for (; i + 4 <= nx - 1; i += 4) {
            const __m256d fc = _mm256_loadu_pd(row + i);
            const __m256d fe = _mm256_loadu_pd(row + i + 1);
            const __m256d fw = _mm256_loadu_pd(row + i - 1);
            const __m256d fu = _mm256_loadu_pd(up + i);
            const __m256d fd = _mm256_loadu_pd(dn + i);
            const __m256d t2c = _mm256_mul_pd(two, fc);
            const __m256d xpart = _mm256_div_pd(_mm256_add_pd(_mm256_sub_pd(fe, t2c), fw), vcx);
            const __m256d ypart = _mm256_div_pd(_mm256_add_pd(_mm256_sub_pd(fu, t2c), fd), vcy);
            _mm256_storeu_pd(o + i, _mm256_add_pd(xpart, ypart));
        }
        for (; i < nx - 1; ++i) {
            o[i] = (row[i + 1] - 2.0 * row[i] + row[i - 1]) / c.cx + (up[i] - 2.0 * row[i] + dn[i]) / c.cy;
        }
        o[nx - 1] =
            (row[0] - 2.0 * row[nx - 1] + row[nx - 2]) / c.cx + (up[nx - 1] - 2.0 * row[nx - 1] + dn[nx - 1]) / c.cy;
    }
}

void laplacian_avx2(int nx, int ny, double hx, double hy, const double* f, double* out) {
    LapCtx c{nx, ny, hx * hx, hy * hy, f, out};
    for_rows(ny, &c, lap_rows);
}

void g_coeffs_avx2(std::size_t n, const double* phi, double* g, double* gp, double kbT,
                   double tau, double ncoef, double rho, double chi) {
    const double rr = rho * rho;
    const double r3 = rho * rho * rho;
    const double c2 = 2.0 * chi * rho * rho;
    const __m256d vone = _mm256_set1_pd(1.0);
    const __m256d vmone = _mm256_set1_pd(-1.0);
    const __m256d vkbT = _mm256_set1_pd(kbT);
    const __m256d vtau = _mm256_set1_pd(tau);
    const __m256d vnco = _mm256_set1_pd(ncoef);
    const __m256d vrho = _mm256_set1_pd(rho);
    const __m256d vrr = _mm256_set1_pd(rr);
    const __m256d vr3 = _mm256_set1_pd(r3);
    const __m256d vc2 = _mm256_set1_pd(c2);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d p = _mm256_loadu_pd(phi + k);
        const __m256d om = _mm256_sub_pd(vone, _mm256_mul_pd(vrho, p));
        const __m256d p2 = _mm256_mul_pd(p, p);
        const __m256d ta = _mm256_div_pd(vone, _mm256_mul_pd(vtau, p));
        const __m256d tb = _mm256_div_pd(vone, _mm256_mul_pd(vnco, p));
        const __m256d tc = _mm256_div_pd(vrr, om);
        const __m256d vg = _mm256_mul_pd(vkbT, _mm256_sub_pd(_mm256_add_pd(_mm256_add_pd(ta, tb), tc), vc2));
        _mm256_storeu_pd(g + k, vg);
        const __m256d ua = _mm256_div_pd(vmone, _mm256_mul_pd(vtau, p2));
        const __m256d ub = _mm256_div_pd(vone, _mm256_mul_pd(vnco, p2));
        const __m256d uc = _mm256_div_pd(vr3, _mm256_mul_pd(om, om));
        const __m256d vgp = _mm256_mul_pd(vkbT, _mm256_add_pd(_mm256_sub_pd(ua, ub), uc));
        _mm256_storeu_pd(gp + k, vgp);
    }
    for (; k < n; ++k) {
        const double p = phi[k];
        const double om = 1.0 - rho * p;
        const double p2 = p * p;
        g[k] = kbT * (1.0 / (tau * p) + 1.0 / (ncoef * p) + rr / om - c2);
        gp[k] = kbT * (-1.0 / (tau * p2) - 1.0 / (ncoef * p2) + r3 / (om * om));
    }
}

struct CombineCtx {
    const double *v, *gp, *gx, *gy, *dxv, *dyv, *g, *lapv, *bihv;
    double inv_dt, c1, c2;
    double* out;
};

void combine_rows(void* ctx, int j0, int j1) {
    const CombineCtx& c = *static_cast<CombineCtx*>(ctx);
    const __m256d vidt = _mm256_set1_pd(c.inv_dt);
    const __m256d vc1 = _mm256_set1_pd(c.c1);
    const __m256d vc2 = _mm256_set1_pd(c.c2);
    std::size_t k = j0;
    const std::size_t k1 = j1;
    for (; k + 4 <= k1; k += 4) {
        const __m256d adv = _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(c.gx + k), _mm256_loadu_pd(c.dxv + k)),
                                          _mm256_mul_pd(_mm256_loadu_pd(c.gy + k), _mm256_loadu_pd(c.dyv + k)));
        const __m256d t0 = _mm256_mul_pd(_mm256_loadu_pd(c.v + k), vidt);
        const __m256d t1 = _mm256_mul_pd(vc1, _mm256_mul_pd(_mm256_loadu_pd(c.gp + k), adv));
        const __m256d t2 = _mm256_mul_pd(vc1, _mm256_mul_pd(_mm256_loadu_pd(c.g + k), _mm256_loadu_pd(c.lapv + k)));
        const __m256d t3 = _mm256_mul_pd(vc2, _mm256_loadu_pd(c.bihv + k));
        _mm256_storeu_pd(c.out + k, _mm256_add_pd(_mm256_sub_pd(_mm256_sub_pd(t0, t1), t2), t3));
    }
    for (; k < k1; ++k) {
        const double adv = c.gx[k] * c.dxv[k] + c.gy[k] * c.dyv[k];
        c.out[k] = c.v[k] * c.inv_dt - c.c1 * (c.gp[k] * adv) - c.c1 * (c.g[k] * c.lapv[k]) + c.c2 * c.bihv[k];
    }
}

void scheme_combine_avx2(std::size_t n, const double* v, double inv_dt, double c1,
                         const double* gp, const double* gx, const double* gy,
                         const double* dxv, const double* dyv, const double* g,
                         const double* lapv, double c2, const double* bihv, double* out) {
    CombineCtx c{v, gp, gx, gy, dxv, dyv, g, lapv, bihv, inv_dt, c1, c2, out};
    for_rows(static_cast<int>(n), &c, combine_rows);
}

struct ResidCtx {
    const double *u, *phin, *gpm, *gmx, *gmy, *gm, *lapn, *lapu, *bihn, *bihu;
    double inv_dt, m0, halfm0, ck;
    double* out;
};

void resid_rows(void* ctx, int j0, int j1) {
    const ResidCtx& c = *static_cast<ResidCtx*>(ctx);
    const __m256d vidt = _mm256_set1_pd(c.inv_dt);
    const __m256d vm0 = _mm256_set1_pd(c.m0);
    const __m256d vhm = _mm256_set1_pd(c.halfm0);
    const __m256d vck = _mm256_set1_pd(c.ck);
    std::size_t k = j0;
    const std::size_t k1 = j1;
    for (; k + 4 <= k1; k += 4) {
        const __m256d mx = _mm256_loadu_pd(c.gmx + k);
        const __m256d my = _mm256_loadu_pd(c.gmy + k);
        const __m256d gm2 = _mm256_add_pd(_mm256_mul_pd(mx, mx), _mm256_mul_pd(my, my));
        const __m256d t0 =
            _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(c.u + k), _mm256_loadu_pd(c.phin + k)), vidt);
        const __m256d t1 = _mm256_mul_pd(vm0, _mm256_mul_pd(_mm256_loadu_pd(c.gpm + k), gm2));
        const __m256d lsum = _mm256_add_pd(_mm256_loadu_pd(c.lapn + k), _mm256_loadu_pd(c.lapu + k));
        const __m256d t2 = _mm256_mul_pd(vhm, _mm256_mul_pd(_mm256_loadu_pd(c.gm + k), lsum));
        const __m256d bsum = _mm256_add_pd(_mm256_loadu_pd(c.bihu + k), _mm256_loadu_pd(c.bihn + k));
        const __m256d t3 = _mm256_mul_pd(vck, bsum);
        _mm256_storeu_pd(c.out + k, _mm256_add_pd(_mm256_sub_pd(_mm256_sub_pd(t0, t1), t2), t3));
    }
    for (; k < k1; ++k) {
        const double gm2 = c.gmx[k] * c.gmx[k] + c.gmy[k] * c.gmy[k];
        c.out[k] = (c.u[k] - c.phin[k]) * c.inv_dt - c.m0 * (c.gpm[k] * gm2) -
                   c.halfm0 * (c.gm[k] * (c.lapn[k] + c.lapu[k])) + c.ck * (c.bihu[k] + c.bihn[k]);
    }
}

void residual_combine_avx2(std::size_t n, const double* u, const double* phin, double inv_dt,
                           double m0, const double* gpm, const double* gmx, const double* gmy,
                           double halfm0, const double* gm, const double* lapn, const double* lapu,
                           double ck, const double* bihn, const double* bihu, double* out) {
    ResidCtx c{u, phin, gpm, gmx, gmy, gm, lapn, lapu, bihn, bihu, inv_dt, m0, halfm0, ck, out};
    for_rows(static_cast<int>(n), &c, resid_rows);
}

}  // namespace

const KernelTable* avx2_table_impl() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    static const KernelTable t = {
        "avx2",
        axpy_avx2,
        axpby_avx2,
        grad_x_avx2,
        grad_y_avx2,
        laplacian_avx2,
        g_coeffs_avx2,
        scheme_combine_avx2,
        residual_combine_avx2,
    };
    return &t;
}

}  // namespace mmctdgl::kernels

#endif  // MMC_TDGL_HAVE_AVX2
