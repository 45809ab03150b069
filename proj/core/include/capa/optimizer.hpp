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

#ifndef CAPA_OPTIMIZER_HPP
#define CAPA_OPTIMIZER_HPP

#include "capa/fisher.hpp"
#include "capa/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace capa
{
    enum class DirectionRule
    {
        FletcherReeves,
        PolakRibiere, // PR+ (beta clamped at zero)
        Plain,        // steepest descent
    };

    DirectionRule parse_direction_rule(const std::string &name); // "FR", "PR", "plain"
    std::string to_string(DirectionRule rule);

    struct SmgdConfig
    {
        double armijo_c = 1e-4;
        double armijo_tau = 0.5;
        int armijo_max_iter = 40;
        double fallback_step = 1e-6;
        double initial_step = 1.0;
        double tolerance_delta = 1e-6; // on |d_{k+1} - d_k|
        double gradient_tolerance = 1e-8;
        int max_iter = 200;
        DirectionRule direction_rule = DirectionRule::FletcherReeves;

        void validate() const;
    };

    struct SmgdRecord
    {
        int iteration = 0;
        double objective = 0.0; // Tr{CRB} at the iterate
        double grad_norm = 0.0; // Riemannian gradient norm (normalized problem)
        double step = 0.0;      // accepted step, 0 for the starting point
        bool fallback = false;  // Armijo failed and the fallback step was taken
    };

    struct SmgdTrace
    {
        std::vector<SmgdRecord> records;
        std::string stop_reason;
    };

    struct SmgdResult
    {
        CVector w;             // best iterate seen, w^H B0 w = P
        double objective = 0.0;
        SmgdTrace trace;
    };

    // Objective on coefficient vectors. gradient follows the convention
    // F(w + d) ~ F(w) + 2 Re{g^H d} and may write F(w) to *value.
    struct Objective
    {
        std::function<double(const CVector &)> value;
        std::function<CVector(const CVector &, double *)> gradient;
    };

    Objective make_objective(const SensingModel &model);

    // Tangent-space projection at w under the metric Re{u^H v}:
    // removes the component along B0 w, so Re{w^H B0 eta} = 0.
    CVector riemannian_grad(const CVector &w, const CVector &euclidean_grad, const CMatrix &B0);

    // sqrt(P) (w + step d) / sqrt(Re{(w + step d)^H B0 (w + step d)}).
    CVector retract(const CVector &w, const CVector &d, double step, const CMatrix &B0, double power);

    // Projection of d_old onto the tangent space at w_new.
    CVector transport(const CVector &w_old, const CVector &w_new, const CVector &d_old, const CMatrix &B0);

    // eta_old and d_old may be empty (first iteration).
    CVector search_direction(const CVector &eta_new, const CVector &eta_old, const CVector &d_old,
                             DirectionRule rule);

    struct ArmijoResult
    {
        double step = 0.0;
        bool fallback = false;
        CVector point;          // retracted trial point for the returned step
        double objective = 0.0; // objective at point
        int evaluations = 0;
    };

    // Backtracks from initial_step by armijo_tau until
    //   F(retract(w, d, step)) <= F(w) + c step Re{eta^H d}.
    // A trial point where the objective throws counts as a rejection. If no
    // trial succeeds the fallback step is returned.
    ArmijoResult armijo_search(const CVector &w, double f_w, const CVector &eta, const CVector &d,
                               const std::function<double(const CVector &)> &f, const CMatrix &B0,
                               double power, const SmgdConfig &config, double initial_step);

    // Riemannian conjugate gradient on {w : w^H B0 w = P}. Internally the
    // problem is solved on the unit ellipsoid with the objective divided by
    // F(w0), so tolerances and step sizes do not depend on the physical
    // scale of Tr{CRB}. Recorded objectives and the returned w are physical.
    SmgdResult smgd(const Objective &objective, const CMatrix &B0, double power, const SmgdConfig &config,
                    const CVector &w0);
    SmgdResult smgd(const SensingModel &model, const SmgdConfig &config, const CVector &w0);
    SmgdResult smgd(const SensingModel &model, const SmgdConfig &config, std::uint64_t seed);

    // Complex standard normal entries (seeded), retracted onto the manifold.
    CVector random_feasible_w(const CMatrix &B0, double power, std::uint64_t seed);
    CVector random_complex_normal(Eigen::Index n, std::uint64_t seed);

} // namespace capa

#endif
