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

#include <string>

#include "mmctdgl/grid.hpp"

namespace mmctdgl::physics {

using grid::Field2D;

// Physical constants of the model. The dynamics evolve the polymer volume
// fraction phi under a reticular bulk free energy plus a constant
// gradient-energy coefficient kcoef.
struct SimParams {
    double m0 = 0.2;      // mobility
    double chi = 0.4;     // interaction parameter
    double tau = 1e7;     // microsphere relaxation scale
    double ncoef = 800.0; // chain length
    double rho = 1.0;     // network density
    double kb = 1.0;      // Boltzmann constant, simulation units
    double temp = 1.0;    // temperature
    double kcoef = 1.0;   // constant gradient-energy coefficient
    double alpha = 1.0;   // log prefactor, bulk energy
    double beta = 1.0;    // log prefactor, bulk energy

    // Positivity of every constant; throws ConfigError listing all failures.
    void check_structural() const;
};

// phi values the dynamics may visit: 0 < lo < hi < 1/rho, so 1 - rho*phi and
// every logarithm in the bulk energy stay defined.
struct AdmissibleBand {
    double lo = 0.0;
    double hi = 0.0;

    AdmissibleBand() = default;
    AdmissibleBand(double lo_, double hi_) : lo(lo_), hi(hi_) {}
    // Default band: (margin, 1/rho - margin).
    static AdmissibleBand with_margin(const SimParams& p, double margin);

    bool contains(double v) const { return v > lo && v < hi; }
};

// Second derivative of the bulk free energy density; the diffusion
// coefficient of the simplified dynamics. Keep the arithmetic order in sync
// with kernels::g_coeffs, the two are required to agree bitwise.
inline double diffusion_coeff_unchecked(double phi, const SimParams& p) {
    const double om = 1.0 - p.rho * phi;
    return p.kb * p.temp *
           (1.0 / (p.tau * phi) + 1.0 / (p.ncoef * phi) + p.rho * p.rho / om - 2.0 * p.chi * p.rho * p.rho);
}

inline double diffusion_coeff_dphi_unchecked(double phi, const SimParams& p) {
    const double om = 1.0 - p.rho * phi;
    const double p2 = phi * phi;
    return p.kb * p.temp *
           (-1.0 / (p.tau * p2) - 1.0 / (p.ncoef * p2) + p.rho * p.rho * p.rho / (om * om));
}

// Domain-checked forms; phi must lie in (0, 1/rho).
double diffusion_coeff(double phi, const SimParams& p);
double diffusion_coeff_dphi(double phi, const SimParams& p);

// Reticular bulk free energy density.
double bulk_free_energy(double phi, const SimParams& p);

// Composition-dependent gradient-energy coefficient sigma^2/(36*phi*(1-phi)).
// Validation tooling only; the dynamics always use the constant kcoef.
double gradient_energy_coeff(double phi, double sigma);

// Total free energy: sum over nodes of [F(phi) + kb*temp*kcoef*|grad phi|^2],
// weighted by hx*hy. Gradient by the central-difference stencil.
double total_energy(const Field2D& f, const SimParams& p);

struct ValidationReport {
    bool ok = false;
    double min_g = 0.0;   // minimum of the diffusion coefficient over the scan
    double argmin_phi = 0.0;
    std::string message;
};

// Scans the diffusion coefficient at 10^4 uniform interior points plus both
// band endpoints; ok iff the minimum is nonnegative.
ValidationReport validate_params(const SimParams& p, const AdmissibleBand& band);

}  // namespace mmctdgl::physics
