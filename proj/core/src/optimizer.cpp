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

#include "capa/optimizer.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace capa
{
    namespace
    {
        double real_inner(const CVector &a, const CVector &b)
        {
            return a.dot(b).real(); // Eigen's dot conjugates the left operand
        }
    } // namespace

    DirectionRule parse_direction_rule(const std::string &name)
    {
        if (name == "FR" || name == "fr")
            return DirectionRule::FletcherReeves;
        if (name == "PR" || name == "pr")
            return DirectionRule::PolakRibiere;
        if (name == "plain")
            return DirectionRule::Plain;
        throw InvalidArgument("unknown direction rule '" + name + "' (expected FR, PR or plain)");
    }

    std::string to_string(DirectionRule rule)
    {
        switch (rule)
        {
        case DirectionRule::FletcherReeves:
            return "FR";
        case DirectionRule::PolakRibiere:
            return "PR";
        case DirectionRule::Plain:
            return "plain";
        }
        return "?";
    }

    void SmgdConfig::validate() const
    {
        if (!(armijo_c > 0.0 && armijo_c < 1.0))
            throw InvalidArgument("Armijo constant must lie in (0, 1)");
        if (!(armijo_tau > 0.0 && armijo_tau < 1.0))
            throw InvalidArgument("Armijo shrink factor must lie in (0, 1)");
        if (armijo_max_iter < 1 || max_iter < 0)
            throw InvalidArgument("iteration limits must be positive");
        if (!(fallback_step > 0.0) || !(initial_step > 0.0))
            throw InvalidArgument("step sizes must be positive");
        if (!(tolerance_delta >= 0.0) || !(gradient_tolerance >= 0.0))
            throw InvalidArgument("tolerances must be non-negative");
    }

    Objective make_objective(const SensingModel &model)
    {
        return Objective{[&model](const CVector &w)
                         { return model.objective(w); },
                         [&model](const CVector &w, double *value)
                         { return model.gradient(w, value); }};
    }

    CVector riemannian_grad(const CVector &w, const CVector &euclidean_grad, const CMatrix &B0)
    {
        const CVector radial = B0 * w;
        const double rr = radial.squaredNorm();
        if (!(rr > 0.0))
            throw InvalidArgument("tangent projection at the zero vector");
        return euclidean_grad - (real_inner(radial, euclidean_grad) / rr) * radial;
    }

    CVector retract(const CVector &w, const CVector &d, double step, const CMatrix &B0, double power)
    {
        const CVector v = (d.size() == 0) ? w : CVector(w + step * d);
        const double norm2 = (v.adjoint() * B0 * v)(0, 0).real();
        if (!(norm2 > 0.0) || !std::isfinite(norm2))
            throw InvalidArgument("retraction of a zero or non-finite vector");
        return std::sqrt(power / norm2) * v;
    }

    CVector transport(const CVector &, const CVector &w_new, const CVector &d_old, const CMatrix &B0)
    {
        if (d_old.size() == 0)
            return d_old;
        return riemannian_grad(w_new, d_old, B0);
    }

    CVector search_direction(const CVector &eta_new, const CVector &eta_old, const CVector &d_old,
                             DirectionRule rule)
    {
        if (rule == DirectionRule::Plain || eta_old.size() == 0 || d_old.size() == 0)
            return -eta_new;
        const double old2 = eta_old.squaredNorm();
        if (!(old2 > 0.0))
            return -eta_new;
        double beta = 0.0;
        if (rule == DirectionRule::FletcherReeves)
            beta = eta_new.squaredNorm() / old2;
        else
            beta = std::max(0.0, real_inner(eta_new, eta_new - eta_old) / old2);
        CVector d = -eta_new + beta * d_old;
        if (!(real_inner(d, eta_new) < 0.0))
            d = -eta_new;
        return d;
    }

    ArmijoResult armijo_search(const CVector &w, double f_w, const CVector &eta, const CVector &d,
                               const std::function<double(const CVector &)> &f, const CMatrix &B0,
                               double power, const SmgdConfig &config, double initial_step)
    {
        ArmijoResult out;
        const double slope = real_inner(eta, d);
        double step = initial_step;
        if (slope < 0.0)
        {
            for (int k = 0; k < config.armijo_max_iter; ++k, step *= config.armijo_tau)
            {
                CVector trial;
                double value = 0.0;
                try
                {
                    trial = retract(w, d, step, B0, power);
                    value = f(trial);
                }
                catch (const Error &)
                {
                    ++out.evaluations;
                    continue;
                }
                ++out.evaluations;
                if (std::isfinite(value) && value <= f_w + config.armijo_c * step * slope)
                {
                    out.step = step;
                    out.point = std::move(trial);
                    out.objective = value;
                    return out;
                }
            }
        }
        out.step = config.fallback_step;
        out.fallback = true;
        ++out.evaluations;
        try
        {
            out.point = retract(w, d, out.step, B0, power);
            out.objective = f(out.point);
            if (std::isfinite(out.objective))
                return out;
        }
        catch (const Error &)
        {
        }
        // Not even the fallback point can be evaluated: stay put.
        out.step = 0.0;
        out.point = w;
        out.objective = f_w;
        return out;
    }

    SmgdResult smgd(const Objective &objective, const CMatrix &B0, double power, const SmgdConfig &config,
                    const CVector &w0)
    {
        config.validate();
        if (!(power > 0.0))
            throw InvalidArgument("power budget must be positive");
        if (w0.size() != B0.rows())
            throw InvalidArgument("initial point has the wrong length");

        const double sqrt_p = std::sqrt(power);
        CVector u = retract(w0, CVector(), 0.0, B0, 1.0);
        const double f_scale = objective.value(sqrt_p * u);
        if (!(f_scale > 0.0) || !std::isfinite(f_scale))
            throw NumericError("objective at the initial point is not positive and finite");

        // Normalized problem on the unit ellipsoid.
        auto f = [&](const CVector &x)
        { return objective.value(sqrt_p * x) / f_scale; };
        auto grad = [&](const CVector &x, double *value)
        {
            double raw = 0.0;
            CVector g = objective.gradient(sqrt_p * x, &raw);
            if (value)
                *value = raw / f_scale;
            return CVector((sqrt_p / f_scale) * g);
        };

        SmgdResult result;
        double fu = 0.0;
        CVector eta = riemannian_grad(u, grad(u, &fu), B0);
        CVector d = -eta;
        double best_f = fu;
        CVector best_u = u;
        double step0 = config.initial_step;
        result.trace.records.push_back({0, fu * f_scale, eta.norm(), 0.0, false});
        result.trace.stop_reason = "max_iter";

        for (int k = 1; k <= config.max_iter; ++k)
        {
            if (eta.norm() < config.gradient_tolerance)
            {
                result.trace.stop_reason = "gradient";
                break;
            }
            const ArmijoResult ar = armijo_search(u, fu, eta, d, f, B0, 1.0, config, step0);
            const CVector u_new = ar.point;
            double f_new = 0.0;
            const CVector eta_new = riemannian_grad(u_new, grad(u_new, &f_new), B0);
            const CVector d_tr = transport(u, u_new, d, B0);
            const CVector d_new = search_direction(eta_new, eta, d_tr, config.direction_rule);
            const double delta = (d_new - d).norm();

            result.trace.records.push_back({k, f_new * f_scale, eta_new.norm(), ar.step, ar.fallback});
            if (f_new < best_f)
            {
                best_f = f_new;
                best_u = u_new;
            }
            u = u_new;
            fu = f_new;
            eta = eta_new;
            d = d_new;
            step0 = ar.fallback ? config.initial_step : 2.0 * ar.step;
            if (delta < config.tolerance_delta)
            {
                result.trace.stop_reason = "direction";
                break;
            }
        }
        result.w = sqrt_p * best_u;
        result.objective = best_f * f_scale;
        return result;
    }

    SmgdResult smgd(const SensingModel &model, const SmgdConfig &config, const CVector &w0)
    {
        return smgd(make_objective(model), model.B0(), model.scenario().power_budget_A2, config, w0);
    }

    SmgdResult smgd(const SensingModel &model, const SmgdConfig &config, std::uint64_t seed)
    {
        return smgd(model, config, random_complex_normal(static_cast<Eigen::Index>(model.target_count()), seed));
    }

    CVector random_complex_normal(Eigen::Index n, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        CVector w(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double re = normal(rng);
            w(i) = cplx(re, normal(rng));
        }
        return w;
    }

    CVector random_feasible_w(const CMatrix &B0, double power, std::uint64_t seed)
    {
        return retract(random_complex_normal(B0.rows(), seed), CVector(), 0.0, B0, power);
    }

} // namespace capa
