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

#include <functional>

#include "mmctdgl/grid.hpp"

namespace mmctdgl::linsolve {

using grid::Field2D;

// Matrix-free operator; apply writes A*in into out (buffers never alias).
struct LinearOperator {
    std::function<void(const Field2D& in, Field2D& out)> apply;
    bool symmetric_hint = false;
};

struct SolveStats {
    int iterations = 0;
    double final_residual_norm = 0.0;
    bool converged = false;
    bool fallback_used = false;
};

struct SolveOptions {
    double tol = 1e-6;
    int maxit = 0;            // 0 means 10 * grid size
    bool absolute_tol = false; // default test is ||b - A x||_h <= tol * max(1, ||b||_h)
    int recompute_interval = 50; // true-residual refresh cadence
};

// Conjugate gradient with x0 warm start. Deterministic: every reduction is
// the fixed sequential order. Throws SolveError on non-convergence or on
// detected stagnation of the true residual.
std::pair<Field2D, SolveStats> cg(const LinearOperator& A, const Field2D& b,
                                  const Field2D& x0, const SolveOptions& opts);

// CG on the normal equations A^T A x = A^T b; convergence is still measured
// on the original residual b - A x.
std::pair<Field2D, SolveStats> cgnr(const LinearOperator& A, const LinearOperator& At,
                                    const Field2D& b, const Field2D& x0,
                                    const SolveOptions& opts);

// Central-difference directional derivative (R(x+e*v) - R(x-e*v))/(2e),
// e = eps * ||x||_h / ||v||_h when both norms are nonzero, else eps.
Field2D jacobian_vector(const std::function<void(const Field2D&, Field2D&)>& R,
                        const Field2D& x, const Field2D& v, double eps);

}  // namespace mmctdgl::linsolve
