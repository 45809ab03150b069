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

#include "capa/channel.hpp"
#include "capa/parallel.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace capa
{
    namespace
    {
        double guarded_distance(const Vec3 &a, const Vec3 &b)
        {
            const double d = (a - b).norm();
            if (!(d >= kSingularityGuard))
            {
                std::ostringstream os;
                os.precision(17);
                os << "kernel singularity: points (" << a.transpose() << ") and (" << b.transpose()
                   << ") are " << d << " m apart";
                throw SingularityError(os.str());
            }
            return d;
        }

        // e^{-j k0 d} / d
        cplx spherical(double d, double k0)
        {
            return std::polar(1.0 / d, -k0 * d);
        }
    } // namespace

    cplx green(double distance, const PhysicalConstants &c)
    {
        if (!(distance >= kSingularityGuard))
            throw SingularityError("kernel singularity at distance " + std::to_string(distance));
        const double k0 = c.wavenumber_k0;
        return kJ * (c.impedance_eta0 * k0 / (4.0 * kPi)) * spherical(distance, k0);
    }

    cplx a_t(const Vec3 &target, const Vec3 &p, const PhysicalConstants &c)
    {
        return green(guarded_distance(target, p), c);
    }

    cplx a_r(const Vec3 &q, const Vec3 &target, const PhysicalConstants &c)
    {
        return green(guarded_distance(q, target), c);
    }

    CVec3 grad_a_t(const Vec3 &target, const Vec3 &p, const PhysicalConstants &c)
    {
        const Vec3 k = target - p;
        const double d = guarded_distance(target, p);
        const cplx a = green(d, c);
        const cplx s = -a * (1.0 + kJ * c.wavenumber_k0 * d) / (d * d);
        return s * k.cast<cplx>();
    }

    CVec3 grad_a_r(const Vec3 &q, const Vec3 &target, const PhysicalConstants &c)
    {
        const Vec3 kappa = q - target;
        const double d = guarded_distance(q, target);
        const cplx a = green(d, c);
        const cplx s = a * (1.0 + kJ * c.wavenumber_k0 * d) / (d * d);
        return s * kappa.cast<cplx>();
    }

    double round_trip_scale(std::size_t target_count)
    {
        if (target_count == 0)
            throw InvalidArgument("round-trip scale needs at least one target");
        return -1.0 / static_cast<double>(target_count);
    }

    cplx round_trip_h(const Vec3 &q, const Vec3 &p, const std::vector<Target> &targets,
                      const PhysicalConstants &c)
    {
        const double scale = c.coupling_c0(targets.size()) / std::sqrt(static_cast<double>(targets.size()));
        cplx h{};
        for (const auto &t : targets)
        {
            const double d_rx = guarded_distance(q, t.position);
            const double d_tx = guarded_distance(t.position, p);
            h += t.reflection * spherical(d_rx, c.wavenumber_k0) * spherical(d_tx, c.wavenumber_k0);
        }
        return scale * h;
    }

    CVector sample_current(const CurrentFunction &current, const QuadratureGrid &tx_grid)
    {
        if (!current.evaluator)
            throw InvalidArgument("current function has no evaluator");
        CVector out(static_cast<Eigen::Index>(tx_grid.size()));
        detail::for_each_block(tx_grid.size(), [&](std::size_t, std::size_t begin, std::size_t end)
                               {
            for (std::size_t i = begin; i < end; ++i)
            {
                const cplx v = current(tx_grid.position(i));
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw NumericError("current is not finite at a transmit grid point");
                out(static_cast<Eigen::Index>(i)) = v;
            } });
        return out;
    }

    double current_power(const CVector &samples, const QuadratureGrid &tx_grid)
    {
        if (static_cast<std::size_t>(samples.size()) != tx_grid.size())
            throw InvalidArgument("current samples do not match the transmit grid");
        return detail::block_reduce(tx_grid.size(), 0.0, [&](std::size_t begin, std::size_t end)
                                    {
            double s = 0.0;
            for (std::size_t i = begin; i < end; ++i)
                s += tx_grid.weight(i) * std::norm(samples(static_cast<Eigen::Index>(i)));
            return s; });
    }

    TransmitMoments transmit_moments(const std::vector<Vec3> &targets, const CVector &current_samples,
                                     const QuadratureGrid &tx_grid, const PhysicalConstants &c)
    {
        if (static_cast<std::size_t>(current_samples.size()) != tx_grid.size())
            throw InvalidArgument("current samples do not match the transmit grid");
        const auto n_targets = static_cast<Eigen::Index>(targets.size());
        // Column 0 holds I1, columns 1..3 the gradient moments.
        const CMatrix zero = CMatrix::Zero(n_targets, 4);
        const CMatrix acc = detail::block_reduce(tx_grid.size(), zero, [&](std::size_t begin, std::size_t end)
                                                 {
            CMatrix s = CMatrix::Zero(n_targets, 4);
            for (std::size_t i = begin; i < end; ++i)
            {
                const Vec3 p = tx_grid.position(i);
                const cplx wj = tx_grid.weight(i) * current_samples(static_cast<Eigen::Index>(i));
                for (Eigen::Index n = 0; n < n_targets; ++n)
                {
                    const Vec3 &r = targets[static_cast<std::size_t>(n)];
                    s(n, 0) += a_t(r, p, c) * wj;
                    const CVec3 g = grad_a_t(r, p, c);
                    for (int ax = 0; ax < 3; ++ax)
                        s(n, 1 + ax) += g(ax) * wj;
                }
            }
            return s; });
        TransmitMoments m;
        m.I1 = acc.col(0);
        m.I2 = acc.rightCols(3);
        return m;
    }

    cplx field_E(const CVector &current_samples, const Vec3 &q, const Scenario &s,
                 const QuadratureGrid &tx_grid)
    {
        if (static_cast<std::size_t>(current_samples.size()) != tx_grid.size())
            throw InvalidArgument("current samples do not match the transmit grid");
        return detail::block_reduce(tx_grid.size(), cplx{}, [&](std::size_t begin, std::size_t end)
                                    {
            cplx acc{};
            for (std::size_t i = begin; i < end; ++i)
                acc += tx_grid.weight(i) * round_trip_h(q, tx_grid.position(i), s.targets, s.constants) *
                       current_samples(static_cast<Eigen::Index>(i));
            return acc; });
    }

    cplx field_E(const CurrentFunction &current, const Vec3 &q, const Scenario &s,
                 const QuadratureGrid &tx_grid)
    {
        return field_E(sample_current(current, tx_grid), q, s, tx_grid);
    }

    FieldSamples field_direct(const CVector &current_samples, const Scenario &s,
                              const QuadratureGrid &tx_grid, const QuadratureGrid &rx_grid)
    {
        FieldSamples out{rx_grid, CVector(static_cast<Eigen::Index>(rx_grid.size()))};
        for (std::size_t i = 0; i < rx_grid.size(); ++i)
            out.values(static_cast<Eigen::Index>(i)) = field_E(current_samples, rx_grid.position(i), s, tx_grid);
        return out;
    }

    FieldSamples synthesize_field(const TransmitMoments &moments, const Scenario &s,
                                  const QuadratureGrid &rx_grid)
    {
        const std::size_t n_targets = s.targets.size();
        if (static_cast<std::size_t>(moments.I1.size()) != n_targets)
            throw InvalidArgument("transmit moments do not match the target count");
        const double gamma = round_trip_scale(n_targets);
        FieldSamples out{rx_grid, CVector(static_cast<Eigen::Index>(rx_grid.size()))};
        detail::for_each_block(rx_grid.size(), [&](std::size_t, std::size_t begin, std::size_t end)
                               {
            for (std::size_t i = begin; i < end; ++i)
            {
                const Vec3 q = rx_grid.position(i);
                cplx e{};
                for (std::size_t n = 0; n < n_targets; ++n)
                    e += s.targets[n].reflection * a_r(q, s.targets[n].position, s.constants) *
                         moments.I1(static_cast<Eigen::Index>(n));
                out.values(static_cast<Eigen::Index>(i)) = gamma * e;
            } });
        return out;
    }

    FieldSamples sample_noise(const QuadratureGrid &rx_grid, double noise_power, std::uint64_t seed)
    {
        if (!(noise_power >= 0.0))
            throw InvalidArgument("noise power must be non-negative");
        FieldSamples out{rx_grid, CVector::Zero(static_cast<Eigen::Index>(rx_grid.size()))};
        if (noise_power == 0.0)
            return out;
        // Sequential draw keeps the stream independent of the thread count.
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t i = 0; i < rx_grid.size(); ++i)
        {
            const double sd = std::sqrt(0.5 * noise_power / rx_grid.weight(i));
            const double re = normal(rng);
            const double im = normal(rng);
            out.values(static_cast<Eigen::Index>(i)) = cplx(sd * re, sd * im);
        }
        return out;
    }

} // namespace capa
