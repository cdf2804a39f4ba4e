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

#include "mmctdgl/grid.hpp"
#include "mmctdgl/linsolve.hpp"
#include "mmctdgl/physics.hpp"

namespace mmctdgl::schemes {

using grid::Field2D;
using physics::AdmissibleBand;
using physics::SimParams;

enum class SchemeKind { Linear, Nonlinear };

struct StepOptions {
    double cg_tol = 1e-6;
    bool cg_absolute_tol = false;
    int cg_maxit = 0;          // 0 = 10 * grid size
    double newton_tol = 1e-8;  // on ||R||_h
    int newton_maxit = 50;
    double fd_eps = 1e-6;      // Jacobian-vector perturbation scale
    AdmissibleBand band;
    bool clamp_band = false;   // strict mode fails the step on a band exit
    bool assert_l2 = true;     // enforce the per-step L2 non-increase
    bool compute_energy = true;
};

struct StepReport {
    linsolve::SolveStats solver;  // iterations totalled across inner solves
    int newton_iterations = 0;    // 0 for the linear scheme
    double l2_before = 0.0;
    double l2_after = 0.0;
    double energy_after = 0.0;
    int band_clamped_nodes = 0;   // nonzero only in clamp mode
};

// One step of the linearized second-order scheme. The implicit system
//   A v = v/dt - (m0/2)*G'(phi_n)*(grad phi_n . grad v)
//             - (m0/2)*G(phi_n)*lap v + m0*kb*T*K*bih v
//   b   = phi_n/dt + (m0/2)*G'(phi_n)*|grad phi_n|^2
//             + (m0/2)*G(phi_n)*lap phi_n - m0*kb*T*K*bih phi_n
// is solved matrix-free by CG warm-started at phi_n; on CG failure the solve
// retries once with the normal-equations fallback using the exact adjoint of
// A (central differences transpose to their negation, the Laplacian to
// itself). Coefficient fields are evaluated once per step.
std::pair<Field2D, StepReport> linear_step(const Field2D& phi_n, double dt,
                                           const SimParams& p, const StepOptions& opts);

// Midpoint-scheme residual with m = (phi_next + phi_n)/2:
//   R = (phi_next - phi_n)/dt - m0*G'(m)*|grad m|^2
//       - m0*G(m)*(lap phi_n + lap phi_next)/2
//       + m0*kb*T*K*(bih phi_next + bih phi_n)
Field2D nonlinear_residual(const Field2D& phi_next, const Field2D& phi_n, double dt,
                           const SimParams& p, const StepOptions& opts);

// Newton iteration on R = 0 from phi_n. The Jacobian is applied matrix-free
// through central finite differences; each direction solves J d = -R by CG.
// Stops at ||R||_h <= newton_tol or ||d||_h <= 1e-12.
std::pair<Field2D, StepReport> nonlinear_step(const Field2D& phi_n, double dt,
                                              const SimParams& p, const StepOptions& opts);

// The assembled one-step operator and right-hand side of the linear scheme,
// exposed so tests can assemble the dense matrix and solve it directly.
linsolve::LinearOperator linear_scheme_operator(const Field2D& phi_n, double dt,
                                                const SimParams& p);
linsolve::LinearOperator linear_scheme_adjoint(const Field2D& phi_n, double dt,
                                               const SimParams& p);
Field2D linear_scheme_rhs(const Field2D& phi_n, double dt, const SimParams& p);

}  // namespace mmctdgl::schemes
