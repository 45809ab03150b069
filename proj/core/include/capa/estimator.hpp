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

#ifndef CAPA_ESTIMATOR_HPP
#define CAPA_ESTIMATOR_HPP

#include "capa/channel.hpp"
#include "capa/geometry.hpp"
#include "capa/quadrature.hpp"
#include "capa/types.hpp"

#include <cstdint>
#include <vector>

namespace capa
{
    // Received data plus everything needed to build field templates.
    struct MleWorkspace
    {
        Scenario scenario;
        QuadratureGrid tx_grid;
        CVector current_samples; // probing current on tx_grid
        FieldSamples received;   // y(q) on the Rx grid

        // Noiseless echo of the scenario's own targets; y = E + n when
        // noise_power > 0 (variance per sample as in sample_noise).
        static MleWorkspace simulate(const Scenario &s, const QuadratureGrid &tx_grid,
                                     const QuadratureGrid &rx_grid, const CVector &current_samples,
                                     double noise_power, std::uint64_t seed);
    };

    // Unit-reflection templates E~_n(q) = gamma a_r(q, r~_n) int a_t(r~_n, p) J(p) dp,
    // one column per candidate, rows in Rx grid order.
    CMatrix candidate_field(const std::vector<Vec3> &candidates, const MleWorkspace &ws);

    // Concentrated likelihood m^H P^{-1} m with m_n = int conj(E~_n) y dq and
    // P_mn = int conj(E~_m) E~_n dq. Throws UnidentifiableError when P is
    // numerically singular (near-coincident candidates).
    double mle_value(const std::vector<Vec3> &candidates, const MleWorkspace &ws);

    // Least-squares reflections P^{-1} m.
    CVector estimate_alpha(const std::vector<Vec3> &candidates, const MleWorkspace &ws);

    enum class SweepAxis
    {
        X,
        Z,
    };

    struct SpectrumPoint
    {
        Vec3 candidate_position = Vec3::Zero();
        double value = 0.0;
    };

    // Sweeps candidate `target_index` along one axis over [lo, hi] (inclusive
    // up to rounding); every other coordinate and every other target stays at
    // the scenario truth.
    std::vector<SpectrumPoint> spectrum_sweep(SweepAxis axis, double lo, double hi, double step,
                                              const MleWorkspace &ws, std::size_t target_index = 0);

    // Index of the first maximum.
    std::size_t spectrum_peak(const std::vector<SpectrumPoint> &spectrum);

    // Peak value over the largest value outside the main lobe (bounded by
    // the first local minima on either side). Infinite if there is no
    // sidelobe in the window.
    double peak_to_sidelobe_ratio(const std::vector<SpectrumPoint> &spectrum);

    // Width of the contiguous region around the peak above half the peak.
    double half_power_width(const std::vector<SpectrumPoint> &spectrum, SweepAxis axis);

    struct NmseOptions
    {
        int trials = 50;
        double window_half_width = 0.25; // m, widened to 2 steps when needed
        int max_candidates = 2001;       // per axis search
        bool aligned = false;            // grid through the truth (no random offset)
        std::size_t target_index = 0;
    };

    struct NmsePoint
    {
        double step = 0.0;
        double nmse = 0.0;   // averaged over the x and z searches
        double nmse_x = 0.0;
        double nmse_z = 0.0;
    };

    // Per-axis grid search around the truth under independent noise draws.
    // Each trial shifts the search grid by a uniform random offset within
    // one step (unless aligned), so coarse grids cost step^2/12 on average.
    std::vector<NmsePoint> nmse_vs_step(const std::vector<double> &steps, const Scenario &s,
                                        const QuadratureGrid &tx_grid, const QuadratureGrid &rx_grid,
                                        const CVector &current_samples, const NmseOptions &options,
                                        std::uint64_t seed);

} // namespace capa

#endif
