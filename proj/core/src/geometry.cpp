// SPDX-License-Identifier: Apache-2.0
//
// capa-sense: CRB-optimal probing-current design for continuous-aperture
// near-field sensing
// Copyright (C) 2026 The capa-sense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "capa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace capa
{
    PhysicalConstants PhysicalConstants::from_frequency(double frequency_hz, double eta0)
    {
        if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
            throw InvalidArgument("frequency must be positive and finite");
        if (!(eta0 > 0.0))
            throw InvalidArgument("wave impedance must be positive");
        PhysicalConstants c;
        c.frequency_hz = frequency_hz;
        c.wavelength_m = kSpeedOfLight / frequency_hz;
        c.wavenumber_k0 = 2.0 * kPi * frequency_hz / kSpeedOfLight;
        c.impedance_eta0 = eta0;
        return c;
    }

    PhysicalConstants PhysicalConstants::from_wavelength(double wavelength_m, double eta0)
    {
        if (!(wavelength_m > 0.0) || !std::isfinite(wavelength_m))
            throw InvalidArgument("wavelength must be positive and finite");
        return from_frequency(kSpeedOfLight / wavelength_m, eta0);
    }

    double PhysicalConstants::coupling_c0(std::size_t target_count) const
    {
        if (target_count == 0)
            throw InvalidArgument("coupling constant needs at least one target");
        const double ek = impedance_eta0 * wavenumber_k0;
        return ek * ek / (16.0 * kPi * kPi * std::sqrt(static_cast<double>(target_count)));
    }

    Aperture Aperture::make(double w_min, double w_max, double h_min, double h_max)
    {
        if (!(w_min < w_max) || !(h_min < h_max))
            throw InvalidArgument("aperture needs w_min < w_max and h_min < h_max");
        return Aperture{w_min, w_max, h_min, h_max};
    }

    double Aperture::diagonal() const
    {
        return std::hypot(width(), height());
    }

    bool Aperture::contains(const Vec3 &p, double tol) const
    {
        return p.x() >= w_min - tol && p.x() <= w_max + tol && p.y() >= h_min - tol &&
               p.y() <= h_max + tol && std::abs(p.z()) <= tol;
    }

    std::vector<Vec3> Scenario::positions() const
    {
        std::vector<Vec3> out;
        out.reserve(targets.size());
        for (const auto &t : targets)
            out.push_back(t.position);
        return out;
    }

    CVector Scenario::reflections() const
    {
        CVector a(static_cast<Eigen::Index>(targets.size()));
        for (std::size_t n = 0; n < targets.size(); ++n)
            a(static_cast<Eigen::Index>(n)) = targets[n].reflection;
        return a;
    }

    void Scenario::validate() const
    {
        if (targets.empty())
            throw InvalidArgument("scenario needs at least one target");
        if (!(constants.wavenumber_k0 > 0.0) || !(constants.impedance_eta0 > 0.0))
            throw InvalidArgument("physical constants not initialised");
        if (!(tx.w_min < tx.w_max) || !(tx.h_min < tx.h_max))
            throw InvalidArgument("degenerate transmit aperture");
        if (!(rx.w_min < rx.w_max) || !(rx.h_min < rx.h_max))
            throw InvalidArgument("degenerate receive aperture");
        if (!(power_budget_A2 > 0.0))
            throw InvalidArgument("power budget must be positive");
        if (!(noise_power > 0.0))
            throw InvalidArgument("noise power must be positive");
        if (quad_points_x < 2 || quad_points_y < 2)
            throw InvalidArgument("need at least two quadrature points per axis");
        for (std::size_t n = 0; n < targets.size(); ++n)
        {
            const auto &t = targets[n];
            if (!t.position.allFinite())
                throw InvalidArgument("target " + std::to_string(n) + " has a non-finite position");
            if (!(t.position.z() > 0.0))
                throw InvalidArgument("target " + std::to_string(n) + " must lie in front of the array (z > 0)");
            if (!std::isfinite(t.reflection.real()) || !std::isfinite(t.reflection.imag()))
                throw InvalidArgument("target " + std::to_string(n) + " has a non-finite reflection coefficient");
            for (std::size_t m = 0; m < n; ++m)
                if ((targets[m].position - t.position).norm() < kMinTargetSeparation)
                    throw InvalidArgument("targets " + std::to_string(m) + " and " + std::to_string(n) +
                                          " coincide");
        }
    }

    Scenario Scenario::with_targets(std::vector<Target> new_targets) const
    {
        Scenario s = *this;
        s.targets = std::move(new_targets);
        return s;
    }

    Scenario Scenario::with_frequency(double frequency_hz) const
    {
        Scenario s = *this;
        s.constants = PhysicalConstants::from_frequency(frequency_hz, constants.impedance_eta0);
        return s;
    }

    Scenario reference_scenario()
    {
        Scenario s;
        s.constants = PhysicalConstants::from_frequency(28e9, kFreeSpaceImpedance);
        s.tx = Aperture::make(-1.0, 0.0, -0.5, 0.5);
        s.rx = Aperture::make(0.0, 1.0, -0.5, 0.5);
        const cplx alpha{10.0, 10.0};
        s.targets = {Target{Vec3(-5.0, 0.0, 5.0), alpha}, Target{Vec3(5.0, 0.0, 5.0), alpha}};
        s.power_budget_A2 = 100.0 * 1e-6; // 100 mA^2
        s.noise_power = 5.6e-3;
        s.quad_points_x = 300;
        s.quad_points_y = 300;
        return s;
    }

    std::vector<NearFieldDiagnostic> admissibility_check(const Scenario &s)
    {
        const double d = std::max(s.tx.diagonal(), s.rx.diagonal());
        const double bound = 2.0 * d * d / s.constants.wavelength_m;
        std::vector<NearFieldDiagnostic> out;
        out.reserve(s.targets.size());
        for (std::size_t n = 0; n < s.targets.size(); ++n)
        {
            NearFieldDiagnostic diag;
            diag.target_index = n;
            diag.range_m = s.targets[n].position.norm();
            diag.fraunhofer_bound_m = bound;
            diag.in_radiating_near_field = diag.range_m <= bound;
            diag.possibly_reactive = diag.range_m < kReactiveWavelengths * s.constants.wavelength_m;
            out.push_back(diag);
        }
        return out;
    }

} // namespace capa
