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

#ifndef CAPA_BASELINES_HPP
#define CAPA_BASELINES_HPP

#include "capa/channel.hpp"
#include "capa/fisher.hpp"
#include "capa/geometry.hpp"
#include "capa/optimizer.hpp"
#include "capa/quadrature.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace capa
{
    // J(p) = sqrt(power / area) e^{j phi(p)}, phi uniform on (-pi, pi]. The
    // phase is a hash of (seed, p), so the current is a fixed function of
    // position and every grid sees the same draw at a shared point.
    CurrentFunction random_policy_current(const Aperture &aperture, std::uint64_t seed, double power = 1.0);

    // Discrete planar array covering an aperture.
    struct SpdaArray
    {
        Aperture aperture;
        double spacing = 0.0;
        double element_area = 0.0;
        std::vector<Vec3> element_positions;

        std::size_t size() const { return element_positions.size(); }
        // The array as a weighted point set (weight = element area), so the
        // continuous-aperture pipeline runs unchanged on discrete sums.
        QuadratureGrid as_grid() const;
    };

    // Elements on a square lattice starting at the min corner plus half a
    // spacing; floor(side / spacing) per side. Defaults: spacing lambda/2,
    // element area lambda^2 / (4 pi).
    SpdaArray make_spda_array(const Aperture &aperture, double wavelength,
                              std::optional<double> spacing = std::nullopt,
                              std::optional<double> element_area = std::nullopt);

    struct SpdaOptions
    {
        std::optional<double> spacing;      // default lambda/2
        std::optional<double> element_area; // default lambda^2/(4 pi)
    };

    SensingModel make_spda_model(const Scenario &s, const SpdaOptions &options = {});

    // Best optimized Tr{CRB} over `starts` seeded SMGD runs on the discrete
    // array (the same subspace parameterization as the continuous case).
    double spda_crb(const Scenario &s, const SmgdConfig &config, std::uint64_t seed, int starts = 1,
                    const SpdaOptions &options = {});

    struct BeamPattern
    {
        std::vector<double> xs; // columns
        std::vector<double> zs; // rows
        RMatrix values;         // zs.size() x xs.size(), peak normalized to 1
    };

    // |int e^{-j k0 |r - p|} J(p) dp|^2 over the y = 0 plane with pathloss
    // removed, normalized to its maximum.
    BeamPattern beam_pattern(const CVector &current_samples, const QuadratureGrid &tx_grid,
                             const std::vector<double> &xs, const std::vector<double> &zs, double k0);

    // Location of the pattern maximum (first in row-major order).
    Vec3 beam_peak(const BeamPattern &pattern);

} // namespace capa

#endif
