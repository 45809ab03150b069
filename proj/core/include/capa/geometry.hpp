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

#ifndef CAPA_GEOMETRY_HPP
#define CAPA_GEOMETRY_HPP

#include "capa/types.hpp"

#include <cstddef>
#include <vector>

namespace capa
{
    inline constexpr double kSpeedOfLight = 2.998e8;      // m/s
    inline constexpr double kFreeSpaceImpedance = 376.73; // ohm

    // Minimum separation between two targets before the configuration is
    // considered degenerate.
    inline constexpr double kMinTargetSeparation = 1e-6; // m

    // Free-space propagation constants at a single carrier frequency. Only the
    // wavenumber and the wave impedance enter the channel model.
    struct PhysicalConstants
    {
        double frequency_hz = 0.0;
        double wavelength_m = 0.0;
        double wavenumber_k0 = 0.0; // rad/m
        double impedance_eta0 = kFreeSpaceImpedance;

        static PhysicalConstants from_frequency(double frequency_hz, double eta0 = kFreeSpaceImpedance);
        static PhysicalConstants from_wavelength(double wavelength_m, double eta0 = kFreeSpaceImpedance);

        // Round-trip coupling constant eta0^2 k0^2 / (16 pi^2 sqrt(N)).
        double coupling_c0(std::size_t target_count) const;
    };

    // Axis-aligned rectangle on the z = 0 plane.
    struct Aperture
    {
        double w_min = 0.0; // x range
        double w_max = 0.0;
        double h_min = 0.0; // y range
        double h_max = 0.0;

        static Aperture make(double w_min, double w_max, double h_min, double h_max);

        double width() const { return w_max - w_min; }
        double height() const { return h_max - h_min; }
        double area() const { return width() * height(); }
        double diagonal() const;
        Vec3 center() const { return {0.5 * (w_min + w_max), 0.5 * (h_min + h_max), 0.0}; }
        bool contains(const Vec3 &p, double tol = 1e-12) const;
    };

    struct Target
    {
        Vec3 position = Vec3::Zero(); // m
        cplx reflection{1.0, 0.0};
    };

    struct Scenario
    {
        PhysicalConstants constants;
        Aperture tx;
        Aperture rx;
        std::vector<Target> targets;
        double power_budget_A2 = 1e-4; // P, in A^2
        double noise_power = 5.6e-3;   // sigma^2
        int quad_points_x = 300;
        int quad_points_y = 300;

        std::size_t target_count() const { return targets.size(); }
        std::vector<Vec3> positions() const;
        CVector reflections() const;

        // Throws InvalidArgument when any invariant is broken: no targets,
        // z <= 0, non-finite reflection, coincident targets, non-positive
        // power or noise, fewer than two quadrature points per axis.
        void validate() const;

        // Copy with a different target list / carrier frequency.
        Scenario with_targets(std::vector<Target> targets) const;
        Scenario with_frequency(double frequency_hz) const;
    };

    // Default configuration of the reference experiments: two targets at
    // 28 GHz in front of side-by-side 1 m x 1 m transmit/receive apertures.
    Scenario reference_scenario();

    struct NearFieldDiagnostic
    {
        std::size_t target_index = 0;
        double range_m = 0.0;            // distance from the origin
        double fraunhofer_bound_m = 0.0; // 2 D^2 / lambda
        bool in_radiating_near_field = false;
        bool possibly_reactive = false; // closer than a few wavelengths
    };

    // Per-target check of r <= 2 D^2 / lambda, with D the larger aperture
    // diagonal. Violations are reported, never thrown.
    std::vector<NearFieldDiagnostic> admissibility_check(const Scenario &s);

    // Number of wavelengths below which a target is flagged as possibly
    // inside the reactive near field.
    inline constexpr double kReactiveWavelengths = 3.0;

} // namespace capa

#endif
