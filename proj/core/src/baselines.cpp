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

#include "capa/baselines.hpp"
#include "capa/parallel.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace capa
{
    namespace
    {
        std::uint64_t splitmix(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        }

        double phase_hash(std::uint64_t seed, double x, double y)
        {
            std::uint64_t h = splitmix(seed);
            h = splitmix(h ^ std::bit_cast<std::uint64_t>(x));
            h = splitmix(h ^ std::bit_cast<std::uint64_t>(y));
            // 53 random bits mapped to (-pi, pi].
            const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
            return kPi - 2.0 * kPi * u;
        }
    } // namespace

    CurrentFunction random_policy_current(const Aperture &aperture, std::uint64_t seed, double power)
    {
        if (!(aperture.area() > 0.0))
            throw InvalidArgument("random policy needs a non-degenerate aperture");
        if (!(power >= 0.0))
            throw InvalidArgument("random policy power must be non-negative");
        const double amp = std::sqrt(power / aperture.area());
        return CurrentFunction{[seed, amp](const Vec3 &p)
                               { return std::polar(amp, phase_hash(seed, p.x(), p.y())); },
                               "random-phase"};
    }

    QuadratureGrid SpdaArray::as_grid() const
    {
        std::vector<double> xs, ys, ws;
        xs.reserve(size());
        ys.reserve(size());
        ws.assign(size(), element_area);
        for (const auto &p : element_positions)
        {
            xs.push_back(p.x());
            ys.push_back(p.y());
        }
        return QuadratureGrid::from_points(aperture, std::move(xs), std::move(ys), std::move(ws), "spda");
    }

    SpdaArray make_spda_array(const Aperture &aperture, double wavelength, std::optional<double> spacing,
                              std::optional<double> element_area)
    {
        if (!(wavelength > 0.0))
            throw InvalidArgument("wavelength must be positive");
        SpdaArray arr;
        arr.aperture = aperture;
        arr.spacing = spacing.value_or(0.5 * wavelength);
        arr.element_area = element_area.value_or(wavelength * wavelength / (4.0 * kPi));
        if (!(arr.spacing > 0.0) || !(arr.element_area > 0.0))
            throw InvalidArgument("element spacing and area must be positive");
        // Small slack so that exact multiples are not lost to rounding.
        const auto nx = static_cast<long>(std::floor(aperture.width() / arr.spacing + 1e-9));
        const auto ny = static_cast<long>(std::floor(aperture.height() / arr.spacing + 1e-9));
        arr.element_positions.reserve(static_cast<std::size_t>(std::max(0L, nx * ny)));
        for (long i = 0; i < nx; ++i)
            for (long j = 0; j < ny; ++j)
                arr.element_positions.emplace_back(aperture.w_min + (i + 0.5) * arr.spacing,
                                                   aperture.h_min + (j + 0.5) * arr.spacing, 0.0);
        return arr;
    }

    SensingModel make_spda_model(const Scenario &s, const SpdaOptions &options)
    {
        const double lambda = s.constants.wavelength_m;
        const SpdaArray tx = make_spda_array(s.tx, lambda, options.spacing, options.element_area);
        const SpdaArray rx = make_spda_array(s.rx, lambda, options.spacing, options.element_area);
        if (tx.size() == 0 || rx.size() == 0)
            throw InvalidArgument("aperture too small for a single array element");
        return SensingModel::build(s, tx.as_grid(), rx.as_grid());
    }

    double spda_crb(const Scenario &s, const SmgdConfig &config, std::uint64_t seed, int starts,
                    const SpdaOptions &options)
    {
        const SensingModel model = make_spda_model(s, options);
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < std::max(1, starts); ++k)
            best = std::min(best, smgd(model, config, seed + static_cast<std::uint64_t>(k)).objective);
        return best;
    }

    BeamPattern beam_pattern(const CVector &current_samples, const QuadratureGrid &tx_grid,
                             const std::vector<double> &xs, const std::vector<double> &zs, double k0)
    {
        if (static_cast<std::size_t>(current_samples.size()) != tx_grid.size())
            throw InvalidArgument("current samples do not match the transmit grid");
        BeamPattern bp;
        bp.xs = xs;
        bp.zs = zs;
        bp.values.resize(static_cast<Eigen::Index>(zs.size()), static_cast<Eigen::Index>(xs.size()));
        const std::size_t cells = xs.size() * zs.size();
        detail::for_each_block(cells, [&](std::size_t, std::size_t begin, std::size_t end)
                               {
            for (std::size_t c = begin; c < end; ++c)
            {
                const std::size_t iz = c / xs.size();
                const std::size_t ix = c % xs.size();
                const Vec3 r(xs[ix], 0.0, zs[iz]);
                cplx acc{};
                for (std::size_t i = 0; i < tx_grid.size(); ++i)
                    acc += tx_grid.weight(i) * std::polar(1.0, -k0 * (r - tx_grid.position(i)).norm()) *
                           current_samples(static_cast<Eigen::Index>(i));
                bp.values(static_cast<Eigen::Index>(iz), static_cast<Eigen::Index>(ix)) = std::norm(acc);
            } });
        const double peak = bp.values.size() ? bp.values.maxCoeff() : 0.0;
        if (peak > 0.0)
            bp.values /= peak;
        return bp;
    }

    Vec3 beam_peak(const BeamPattern &pattern)
    {
        if (pattern.values.size() == 0)
            throw InvalidArgument("empty beam pattern");
        Eigen::Index bi = 0, bj = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < pattern.values.rows(); ++i)
            for (Eigen::Index j = 0; j < pattern.values.cols(); ++j)
                if (pattern.values(i, j) > best)
                {
                    best = pattern.values(i, j);
                    bi = i;
                    bj = j;
                }
        return {pattern.xs[static_cast<std::size_t>(bj)], 0.0, pattern.zs[static_cast<std::size_t>(bi)]};
    }

} // namespace capa
