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

#include "capa/estimator.hpp"
#include "capa/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace capa
{
    namespace
    {
        using Index = Eigen::Index;

        constexpr double kGramConditionLimit = 1e-12;

        CVector template_column(const Vec3 &candidate, const MleWorkspace &ws)
        {
            const auto &c = ws.scenario.constants;
            const TransmitMoments mom = transmit_moments({candidate}, ws.current_samples, ws.tx_grid, c);
            const cplx scale = round_trip_scale(ws.scenario.targets.size()) * mom.I1(0);
            const QuadratureGrid &rx = ws.received.grid;
            CVector col(static_cast<Index>(rx.size()));
            detail::for_each_block(rx.size(), [&](std::size_t, std::size_t begin, std::size_t end)
                                   {
                for (std::size_t i = begin; i < end; ++i)
                    col(static_cast<Index>(i)) = scale * a_r(rx.position(i), candidate, c); });
            return col;
        }

        struct Normal
        {
            CMatrix P;
            CVector m;
        };

        Normal normal_equations(const CMatrix &E, const FieldSamples &y)
        {
            if (E.rows() != y.values.size())
                throw InvalidArgument("templates and received samples differ in length");
            RVector w(E.rows());
            for (Index i = 0; i < E.rows(); ++i)
                w(i) = y.grid.weight(static_cast<std::size_t>(i));
            const CMatrix WE = w.asDiagonal() * E;
            return Normal{E.adjoint() * WE, WE.adjoint() * y.values};
        }

        Eigen::LDLT<CMatrix> factor_gram(const CMatrix &P)
        {
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(P);
            const RVector ev = eig.eigenvalues();
            if (!(ev.minCoeff() > kGramConditionLimit * ev.maxCoeff()))
                throw UnidentifiableError("template Gram matrix is singular (near-coincident candidates)");
            return Eigen::LDLT<CMatrix>(P);
        }

        double concentrated(const Normal &ne)
        {
            const CVector x = factor_gram(ne.P).solve(ne.m);
            return std::max(0.0, ne.m.dot(x).real());
        }

        std::uint64_t splitmix(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        }

        int axis_index(SweepAxis axis) { return axis == SweepAxis::X ? 0 : 2; }
    } // namespace

    MleWorkspace MleWorkspace::simulate(const Scenario &s, const QuadratureGrid &tx_grid,
                                        const QuadratureGrid &rx_grid, const CVector &current_samples,
                                        double noise_power, std::uint64_t seed)
    {
        MleWorkspace ws;
        ws.scenario = s;
        ws.tx_grid = tx_grid;
        ws.current_samples = current_samples;
        const TransmitMoments mom = transmit_moments(s.positions(), current_samples, tx_grid, s.constants);
        ws.received = synthesize_field(mom, s, rx_grid);
        if (noise_power > 0.0)
            ws.received.values += sample_noise(rx_grid, noise_power, seed).values;
        return ws;
    }

    CMatrix candidate_field(const std::vector<Vec3> &candidates, const MleWorkspace &ws)
    {
        CMatrix E(static_cast<Index>(ws.received.grid.size()), static_cast<Index>(candidates.size()));
        for (std::size_t n = 0; n < candidates.size(); ++n)
            E.col(static_cast<Index>(n)) = template_column(candidates[n], ws);
        return E;
    }

    double mle_value(const std::vector<Vec3> &candidates, const MleWorkspace &ws)
    {
        if (candidates.empty())
            throw InvalidArgument("need at least one candidate position");
        return concentrated(normal_equations(candidate_field(candidates, ws), ws.received));
    }

    CVector estimate_alpha(const std::vector<Vec3> &candidates, const MleWorkspace &ws)
    {
        if (candidates.empty())
            throw InvalidArgument("need at least one candidate position");
        const Normal ne = normal_equations(candidate_field(candidates, ws), ws.received);
        return factor_gram(ne.P).solve(ne.m);
    }

    std::vector<SpectrumPoint> spectrum_sweep(SweepAxis axis, double lo, double hi, double step,
                                              const MleWorkspace &ws, std::size_t target_index)
    {
        if (!(step > 0.0) || !(hi >= lo))
            throw InvalidArgument("spectrum sweep needs step > 0 and hi >= lo");
        if (target_index >= ws.scenario.targets.size())
            throw InvalidArgument("target index out of range");
        const std::vector<Vec3> truth = ws.scenario.positions();
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;

        // Templates of the fixed targets are shared by every sweep point.
        const CMatrix fixed = candidate_field(truth, ws);
        std::vector<SpectrumPoint> out(count);
        for (std::size_t k = 0; k < count; ++k)
        {
            Vec3 cand = truth[target_index];
            cand(axis_index(axis)) = lo + static_cast<double>(k) * step;
            CMatrix E = fixed;
            E.col(static_cast<Index>(target_index)) = template_column(cand, ws);
            out[k].candidate_position = cand;
            out[k].value = concentrated(normal_equations(E, ws.received));
        }
        return out;
    }

    std::size_t spectrum_peak(const std::vector<SpectrumPoint> &spectrum)
    {
        if (spectrum.empty())
            throw InvalidArgument("empty spectrum");
        std::size_t best = 0;
        for (std::size_t k = 1; k < spectrum.size(); ++k)
            if (spectrum[k].value > spectrum[best].value)
                best = k;
        return best;
    }

    double peak_to_sidelobe_ratio(const std::vector<SpectrumPoint> &spectrum)
    {
        const std::size_t peak = spectrum_peak(spectrum);
        std::size_t left = peak;
        while (left > 0 && spectrum[left - 1].value <= spectrum[left].value)
            --left;
        std::size_t right = peak;
        while (right + 1 < spectrum.size() && spectrum[right + 1].value <= spectrum[right].value)
            ++right;
        double side = 0.0;
        for (std::size_t k = 0; k < spectrum.size(); ++k)
            if (k < left || k > right)
                side = std::max(side, spectrum[k].value);
        if (side <= 0.0)
            return std::numeric_limits<double>::infinity();
        return spectrum[peak].value / side;
    }

    double half_power_width(const std::vector<SpectrumPoint> &spectrum, SweepAxis axis)
    {
        const std::size_t peak = spectrum_peak(spectrum);
        const double half = 0.5 * spectrum[peak].value;
        std::size_t left = peak;
        while (left > 0 && spectrum[left - 1].value >= half)
            --left;
        std::size_t right = peak;
        while (right + 1 < spectrum.size() && spectrum[right + 1].value >= half)
            ++right;
        const int a = axis_index(axis);
        return spectrum[right].candidate_position(a) - spectrum[left].candidate_position(a);
    }

    std::vector<NmsePoint> nmse_vs_step(const std::vector<double> &steps, const Scenario &s,
                                        const QuadratureGrid &tx_grid, const QuadratureGrid &rx_grid,
                                        const CVector &current_samples, const NmseOptions &options,
                                        std::uint64_t seed)
    {
        if (options.trials < 1)
            throw InvalidArgument("NMSE needs at least one trial");
        if (options.target_index >= s.targets.size())
            throw InvalidArgument("target index out of range");
        for (double st : steps)
            if (!(st > 0.0))
                throw InvalidArgument("NMSE step sizes must be positive");

        MleWorkspace base = MleWorkspace::simulate(s, tx_grid, rx_grid, current_samples, 0.0, 0);
        const CVector clean = base.received.values;
        const std::vector<Vec3> truth = s.positions();
        const Vec3 r_true = truth[options.target_index];
        const double norm2 = r_true.squaredNorm();
        const CMatrix fixed = candidate_field(truth, base);

        std::vector<NmsePoint> out;
        out.reserve(steps.size());
        for (std::size_t si = 0; si < steps.size(); ++si)
        {
            const double step = steps[si];
            const double window = std::max(options.window_half_width, 2.0 * step);
            const int half = std::min(static_cast<int>(std::floor(window / step + 1e-9)),
                                      std::max(1, options.max_candidates / 2));
            std::mt19937_64 rng(splitmix(seed ^ splitmix(si + 1)));
            std::uniform_real_distribution<double> shift(-0.5 * step, 0.5 * step);

            double sum_x = 0.0, sum_z = 0.0;
            for (int t = 0; t < options.trials; ++t)
            {
                MleWorkspace ws = base;
                if (s.noise_power > 0.0)
                    ws.received.values =
                        clean + sample_noise(rx_grid, s.noise_power, splitmix(seed + 0x1000u * (si + 1) + t)).values;
                for (SweepAxis axis : {SweepAxis::X, SweepAxis::Z})
                {
                    const int a = axis_index(axis);
                    const double offset = options.aligned ? 0.0 : shift(rng);
                    double best_val = -1.0;
                    double best_coord = r_true(a);
                    for (int k = -half; k <= half; ++k)
                    {
                        Vec3 cand = r_true;
                        cand(a) += offset + k * step;
                        if (cand.z() <= 0.0)
                            continue;
                        CMatrix E = fixed;
                        E.col(static_cast<Index>(options.target_index)) = template_column(cand, ws);
                        double v = -1.0;
                        try
                        {
                            v = concentrated(normal_equations(E, ws.received));
                        }
                        catch (const UnidentifiableError &)
                        {
                            continue; // candidate collides with another target
                        }
                        if (v > best_val)
                        {
                            best_val = v;
                            best_coord = cand(a);
                        }
                    }
                    const double err = best_coord - r_true(a);
                    (axis == SweepAxis::X ? sum_x : sum_z) += err * err;
                }
            }
            NmsePoint p;
            p.step = step;
            p.nmse_x = sum_x / options.trials / norm2;
            p.nmse_z = sum_z / options.trials / norm2;
            p.nmse = 0.5 * (p.nmse_x + p.nmse_z);
            out.push_back(p);
        }
        return out;
    }

} // namespace capa
