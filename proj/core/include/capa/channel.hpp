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

#ifndef CAPA_CHANNEL_HPP
#define CAPA_CHANNEL_HPP

#include "capa/geometry.hpp"
#include "capa/quadrature.hpp"
#include "capa/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace capa
{
    // Distances below this raise SingularityError instead of blowing up.
    inline constexpr double kSingularityGuard = 1e-9; // m

    // Scalar outgoing-wave Green's function j eta0 k0 e^{-j k0 d} / (4 pi d).
    cplx green(double distance, const PhysicalConstants &c);

    // Transmit response from p to a target at r; depends only on |r - p|.
    cplx a_t(const Vec3 &target, const Vec3 &p, const PhysicalConstants &c);

    // Receive response from a target at r to q. Same kernel as a_t (the
    // outgoing e^{-j k0 d} convention is used on both legs).
    cplx a_r(const Vec3 &q, const Vec3 &target, const PhysicalConstants &c);

    // Gradients with respect to the target position.
    CVec3 grad_a_t(const Vec3 &target, const Vec3 &p, const PhysicalConstants &c);
    CVec3 grad_a_r(const Vec3 &q, const Vec3 &target, const PhysicalConstants &c);

    // Scale that turns products of the two Green kernels into the round-trip
    // channel: c0/sqrt(N) * (4 pi / (j eta0 k0))^2 = -1/N.
    double round_trip_scale(std::size_t target_count);

    // Round-trip channel h(q, p), evaluated literally from the
    // exponential-over-distance kernels and c0.
    cplx round_trip_h(const Vec3 &q, const Vec3 &p, const std::vector<Target> &targets,
                      const PhysicalConstants &c);

    // Source current J(p) on the transmit aperture.
    struct CurrentFunction
    {
        std::function<cplx(const Vec3 &p)> evaluator;
        std::string tag;

        cplx operator()(const Vec3 &p) const { return evaluator(p); }
    };

    // Samples J at every grid point (grid order).
    CVector sample_current(const CurrentFunction &current, const QuadratureGrid &tx_grid);

    // Quadrature estimate of the power integral of |J|^2.
    double current_power(const CVector &samples, const QuadratureGrid &tx_grid);

    struct FieldSamples
    {
        QuadratureGrid grid;
        CVector values;
    };

    // Per-target transmit integrals of a fixed current:
    //   I1[n]    = int a_t(r_n, p) J(p) dp
    //   I2(n, i) = int d/dr_{n,i} a_t(r_n, p) J(p) dp
    struct TransmitMoments
    {
        CVector I1;
        CMatrix I2; // N x 3
    };

    TransmitMoments transmit_moments(const std::vector<Vec3> &targets, const CVector &current_samples,
                                     const QuadratureGrid &tx_grid, const PhysicalConstants &c);

    // E(q) = int h(q, p) J(p) dp by direct quadrature over the Tx grid.
    cplx field_E(const CVector &current_samples, const Vec3 &q, const Scenario &s,
                 const QuadratureGrid &tx_grid);
    cplx field_E(const CurrentFunction &current, const Vec3 &q, const Scenario &s,
                 const QuadratureGrid &tx_grid);

    // Batched direct form over an Rx grid. Cost is |rx| * |tx| * N.
    FieldSamples field_direct(const CVector &current_samples, const Scenario &s,
                              const QuadratureGrid &tx_grid, const QuadratureGrid &rx_grid);

    // Factored form: E(q) = gamma * sum_n alpha_n a_r(q, r_n) I1[n].
    FieldSamples synthesize_field(const TransmitMoments &moments, const Scenario &s,
                                  const QuadratureGrid &rx_grid);

    // Circularly-symmetric complex Gaussian samples with variance
    // sigma^2 / w_i at the i-th grid point, so that weighted inner products
    // reproduce a white process of spectral level sigma^2.
    FieldSamples sample_noise(const QuadratureGrid &rx_grid, double noise_power, std::uint64_t seed);

} // namespace capa

#endif
