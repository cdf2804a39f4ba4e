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
#include <vector>

#include "mmctdgl/errors.hpp"

namespace mmctdgl::grid {

// Uniform periodic rectangular grid on (0,lx) x (0,ly), node-centered,
// x_i = i*hx, y_j = j*hy.
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;
    double hx = 0.0;
    double hy = 0.0;

    Grid2D() = default;
    Grid2D(int nx_, int ny_, double lx_, double ly_);

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    // Flat index, row-major: i fastest.
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * nx; }
    double cell_area() const { return hx * hy; }

    bool operator==(const Grid2D& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
};

// Scalar field, one value per node.
struct Field2D {
    Grid2D grid;
    std::vector<double> values;

    Field2D() = default;
    explicit Field2D(const Grid2D& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

    double& at(int i, int j) { return values[grid.idx(i, j)]; }
    double at(int i, int j) const { return values[grid.idx(i, j)]; }
    double* data() { return values.data(); }
    const double* data() const { return values.data(); }
    std::size_t size() const { return values.size(); }
};

// Componentwise central-difference gradient.
struct VectorField2D {
    Grid2D grid;
    std::vector<double> x;
    std::vector<double> y;

    VectorField2D() = default;
    explicit VectorField2D(const Grid2D& g) : grid(g), x(g.size(), 0.0), y(g.size(), 0.0) {}
};

// Value-returning operator forms.
VectorField2D gradient(const Field2D& f);
Field2D laplacian(const Field2D& f);
// Composition of two 5-point Laplacians; no widened one-shot stencil.
Field2D biharmonic(const Field2D& f);
Field2D shift(const Field2D& f, int sx, int sy);

// In-place forms for hot paths; out buffers must have grid size.
void gradient_into(const Field2D& f, double* gx, double* gy);
void laplacian_into(const Grid2D& g, const double* f, double* out);

// Discrete L2 inner product: (sum_k f_k*g_k) * hx*hy, sequential row-major sum.
double inner(const Field2D& f, const Field2D& g);
double l2_norm(const Field2D& f);
double mean(const Field2D& f);
void minmax(const Field2D& f, double& mn, double& mx);

// Elementwise helpers on matching grids.
Field2D operator+(const Field2D& a, const Field2D& b);
Field2D operator-(const Field2D& a, const Field2D& b);
Field2D scaled(const Field2D& a, double s);

}  // namespace mmctdgl::grid
