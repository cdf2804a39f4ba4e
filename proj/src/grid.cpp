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

#include "mmctdgl/grid.hpp"

#include <cmath>
#include <string>

#include "mmctdgl/kernels.hpp"

namespace mmctdgl::grid {

Grid2D::Grid2D(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
    // Three nodes per direction is the minimum for a distinct left and right
    // neighbour under periodic wrap.
    if (nx < 3 || ny < 3) {
        throw DomainError("grid needs nx >= 3 and ny >= 3, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
    }
    if (!(lx > 0.0) || !(ly > 0.0)) {
        throw DomainError("grid needs positive domain lengths, got lx=" + std::to_string(lx) +
                          " ly=" + std::to_string(ly));
    }
    hx = lx / nx;
    hy = ly / ny;
}

namespace {

void require_same_grid(const Grid2D& a, const Grid2D& b) {
    if (!(a == b)) throw DomainError("fields live on different grids");
}

}  // namespace

VectorField2D gradient(const Field2D& f) {
    VectorField2D out(f.grid);
    gradient_into(f, out.x.data(), out.y.data());
    return out;
}

void gradient_into(const Field2D& f, double* gx, double* gy) {
    const kernels::KernelTable& k = kernels::active();
    k.grad_x(f.grid.nx, f.grid.ny, f.grid.hx, f.data(), gx);
    k.grad_y(f.grid.nx, f.grid.ny, f.grid.hy, f.data(), gy);
}

Field2D laplacian(const Field2D& f) {
    Field2D out(f.grid);
    laplacian_into(f.grid, f.data(), out.data());
    return out;
}

void laplacian_into(const Grid2D& g, const double* f, double* out) {
    kernels::active().laplacian(g.nx, g.ny, g.hx, g.hy, f, out);
}

Field2D biharmonic(const Field2D& f) {
    Field2D mid(f.grid);
    laplacian_into(f.grid, f.data(), mid.data());
    Field2D out(f.grid);
    laplacian_into(f.grid, mid.data(), out.data());
    return out;
}

Field2D shift(const Field2D& f, int sx, int sy) {
    const int nx = f.grid.nx;
    const int ny = f.grid.ny;
    // shifted(i,j) = f(i-sx, j-sy), indices wrapped; shifting then applying a
    // stencil equals applying then shifting.
    const int ox = ((sx % nx) + nx) % nx;
    const int oy = ((sy % ny) + ny) % ny;
    Field2D out(f.grid);
    for (int j = 0; j < ny; ++j) {
        const int js = (j - oy + ny) % ny;
        for (int i = 0; i < nx; ++i) {
            const int is = (i - ox + nx) % nx;
            out.at(i, j) = f.at(is, js);
        }
    }
    return out;
}

double inner(const Field2D& f, const Field2D& g) {
    require_same_grid(f.grid, g.grid);
    return kernels::dot_seq(f.size(), f.data(), g.data()) * f.grid.cell_area();
}

double l2_norm(const Field2D& f) { return std::sqrt(inner(f, f)); }

double mean(const Field2D& f) {
    return kernels::sum_seq(f.size(), f.data()) / static_cast<double>(f.size());
}

void minmax(const Field2D& f, double& mn, double& mx) {
    kernels::minmax_seq(f.size(), f.data(), mn, mx);
}

Field2D operator+(const Field2D& a, const Field2D& b) {
    require_same_grid(a.grid, b.grid);
    Field2D out = a;
    kernels::active().axpy(out.size(), 1.0, b.data(), out.data());
    return out;
}

Field2D operator-(const Field2D& a, const Field2D& b) {
    require_same_grid(a.grid, b.grid);
    Field2D out = a;
    kernels::active().axpy(out.size(), -1.0, b.data(), out.data());
    return out;
}

Field2D scaled(const Field2D& a, double s) {
    Field2D out = a;
    kernels::active().axpby(out.size(), 0.0, a.data(), s, out.data());
    return out;
}

}  // namespace mmctdgl::grid
