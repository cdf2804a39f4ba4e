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

#include "mmctdgl/physics.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "mmctdgl/kernels.hpp"

namespace mmctdgl::physics {

void SimParams::check_structural() const {
    std::ostringstream bad;
    const auto need_positive = [&bad](const char* key, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            if (bad.tellp() > 0) bad << "; ";
            bad << key << " must be a positive finite number, got " << v;
        }
    };
    need_positive("m0", m0);
    need_positive("chi", chi);
    need_positive("tau", tau);
    need_positive("ncoef", ncoef);
    need_positive("rho", rho);
    need_positive("kb", kb);
    need_positive("temp", temp);
    need_positive("kcoef", kcoef);
    need_positive("alpha", alpha);
    need_positive("beta", beta);
    if (bad.tellp() > 0) throw ConfigError(bad.str());
}

AdmissibleBand AdmissibleBand::with_margin(const SimParams& p, double margin) {
    const double cap = 1.0 / p.rho;
    if (!(margin > 0.0) || !(margin < 0.5 * cap)) {
        throw DomainError("band margin must lie in (0, 1/(2*rho))");
    }
    return AdmissibleBand(margin, cap - margin);
}

namespace {

void require_admissible(double phi, const SimParams& p, const char* what) {
    if (!(phi > 0.0) || !(phi < 1.0 / p.rho)) {
        throw DomainError(std::string(what) + " needs phi in (0, 1/rho), got phi=" + std::to_string(phi));
    }
}

}  // namespace

double diffusion_coeff(double phi, const SimParams& p) {
    require_admissible(phi, p, "diffusion coefficient");
    return diffusion_coeff_unchecked(phi, p);
}

double diffusion_coeff_dphi(double phi, const SimParams& p) {
    require_admissible(phi, p, "diffusion coefficient derivative");
    return diffusion_coeff_dphi_unchecked(phi, p);
}

double bulk_free_energy(double phi, const SimParams& p) {
    require_admissible(phi, p, "bulk free energy");
    const double om = 1.0 - p.rho * phi;
    return p.kb * p.temp *
           (phi / p.tau * std::log(p.alpha * phi / p.tau) + phi / p.ncoef * std::log(p.beta * phi / p.tau) +
            om * std::log(om) + p.chi * p.rho * phi * om);
}

double gradient_energy_coeff(double phi, double sigma) {
    if (!(phi > 0.0) || !(phi < 1.0)) {
        throw DomainError("composition-dependent gradient coefficient needs phi in (0, 1), got phi=" +
                          std::to_string(phi));
    }
    return sigma * sigma / (36.0 * phi * (1.0 - phi));
}

double total_energy(const Field2D& f, const SimParams& p) {
    const std::size_t n = f.size();
    std::vector<double> gx(n), gy(n);
    grid::gradient_into(f, gx.data(), gy.data());
    const double ck = p.kb * p.temp * p.kcoef;
    // One sequential row-major sum, area weight applied once at the end;
    // matches the convention of grid::inner.
    double acc = 0.0;
    const double* phi = f.data();
    for (std::size_t k = 0; k < n; ++k) {
        acc += bulk_free_energy(phi[k], p) + ck * (gx[k] * gx[k] + gy[k] * gy[k]);
    }
    return acc * f.grid.cell_area();
}

ValidationReport validate_params(const SimParams& p, const AdmissibleBand& band) {
    p.check_structural();
    if (!(band.lo > 0.0) || !(band.lo < band.hi) || !(band.hi < 1.0 / p.rho)) {
        throw DomainError("admissible band must satisfy 0 < lo < hi < 1/rho");
    }
    ValidationReport rep;
    const int interior = 10000;
    rep.min_g = diffusion_coeff_unchecked(band.lo, p);
    rep.argmin_phi = band.lo;
    const auto consider = [&rep, &p](double phi) {
        const double g = diffusion_coeff_unchecked(phi, p);
        if (g < rep.min_g) {
            rep.min_g = g;
            rep.argmin_phi = phi;
        }
    };
    for (int i = 1; i <= interior; ++i) {
        consider(band.lo + (band.hi - band.lo) * i / (interior + 1));
    }
    consider(band.hi);
    rep.ok = rep.min_g >= 0.0;
    std::ostringstream msg;
    if (rep.ok) {
        msg << "diffusion coefficient stays nonnegative on [" << band.lo << ", " << band.hi
            << "]; minimum " << rep.min_g << " at phi=" << rep.argmin_phi;
    } else {
        msg << "diffusion coefficient turns negative on the admissible band: " << rep.min_g
            << " at phi=" << rep.argmin_phi << "; the simplified dynamics are not dissipative there";
    }
    rep.message = msg.str();
    return rep;
}

}  // namespace mmctdgl::physics
