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

#include "capa/experiments.hpp"
#include "capa/baselines.hpp"
#include "capa/config.hpp"
#include "capa/estimator.hpp"
#include "capa/fisher.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

namespace capa
{
    namespace
    {
        constexpr int kTestGl = 120;
        constexpr int kPaperGl = 300;

        // Evaluation window for maps and beam patterns on the y = 0 plane.
        constexpr double kMapXMin = -7.0, kMapXMax = 7.0;
        constexpr double kMapZMin = 0.1, kMapZMax = 9.0;

        std::string fmt(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        // Grid coordinates and sweep settings; trims k * step rounding noise.
        std::string coord(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }

        std::vector<double> linspace(double lo, double hi, int count)
        {
            std::vector<double> v(static_cast<std::size_t>(count));
            for (int i = 0; i < count; ++i)
                v[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
            return v;
        }

        void preamble(std::ostream &os, const ExperimentSpec &spec, const char *columns)
        {
            os << "# config_hash=" << config_hash_hex(spec.scenario) << " kind=" << spec.kind
               << " seed=" << spec.seed << " gl_points=" << spec.resolved_gl_points()
               << " fidelity=" << (spec.fidelity == Fidelity::Paper ? "paper" : "test") << "\n";
            os << columns << "\n";
        }

        SmgdConfig config_for(const ExperimentSpec &spec)
        {
            SmgdConfig c;
            c.direction_rule = spec.rule;
            return c;
        }

        Scenario single_target(const Scenario &s, std::size_t target)
        {
            if (target >= s.targets.size())
                throw InvalidArgument("target index out of range");
            return s.with_targets({s.targets[target]});
        }

        bool paper(const ExperimentSpec &spec) { return spec.fidelity == Fidelity::Paper; }

        CVector probing_current(const ExperimentSpec &spec, const SensingModel &model)
        {
            const Scenario &s = model.scenario();
            if (spec.policy == "random")
                return sample_current(random_policy_current(s.tx, spec.seed, s.power_budget_A2), model.tx_grid());
            const SmgdResult r = optimize_best(model, config_for(spec), spec.seed, spec.starts);
            return subspace_current_samples(model.basis(), r.w, model.tx_grid());
        }
    } // namespace

    Fidelity parse_fidelity(const std::string &name)
    {
        if (name == "test")
            return Fidelity::Test;
        if (name == "paper")
            return Fidelity::Paper;
        throw InvalidArgument("unknown fidelity '" + name + "' (expected test or paper)");
    }

    int ExperimentSpec::resolved_gl_points() const
    {
        if (gl_points)
            return *gl_points;
        return fidelity == Fidelity::Paper ? kPaperGl : kTestGl;
    }

    void ExperimentSpec::validate() const
    {
        scenario.validate();
        if (resolved_gl_points() < 2)
            throw InvalidArgument("need at least two Gauss-Legendre points per axis");
        if (starts < 1)
            throw InvalidArgument("need at least one optimizer start");
        if (policy != "optimized" && policy != "random")
            throw InvalidArgument("policy must be 'optimized' or 'random'");
        if (target >= scenario.targets.size())
            throw InvalidArgument("target index out of range");
    }

    SmgdResult optimize_best(const SensingModel &model, const SmgdConfig &config, std::uint64_t seed, int starts)
    {
        SmgdResult best;
        best.objective = std::numeric_limits<double>::infinity();
        for (int k = 0; k < std::max(1, starts); ++k)
        {
            SmgdResult r = smgd(model, config, seed + static_cast<std::uint64_t>(k));
            if (r.objective < best.objective)
                best = std::move(r);
        }
        return best;
    }

    double crb_with_prior_error(const Scenario &s, std::size_t target, const Vec3 &offset, int gl_points,
                                const SmgdConfig &config, std::uint64_t seed, int starts)
    {
        if (target >= s.targets.size())
            throw InvalidArgument("target index out of range");
        const SensingModel truth = SensingModel::build(s, gl_points);
        Scenario prior = s;
        prior.targets[target].position += offset;
        const SensingModel model = SensingModel::build(prior, gl_points);
        const SmgdResult r = optimize_best(model, config, seed, starts);
        // The current is a function on the aperture; resample it on the truth
        // grid (identical here, but keeps the two models decoupled).
        const CVector J = subspace_current_samples(model.basis(), r.w, truth.tx_grid());
        return truth.crb_of_current(J);
    }

    void run_gl_convergence(const ExperimentSpec &spec, std::ostream &os)
    {
        preamble(os, spec, "n_points,crb_integral_value,power_integral_value");
        // Raw complex normal weights: no power normalization.
        const CVector w = random_complex_normal(static_cast<Eigen::Index>(spec.scenario.targets.size()), spec.seed);
        std::vector<int> sizes = {2};
        for (int n = 20; n <= 300; n += 20)
            sizes.push_back(n);
        for (int n : sizes)
        {
            const SensingModel m = SensingModel::build(spec.scenario, n);
            double crb = std::numeric_limits<double>::quiet_NaN();
            try
            {
                crb = m.objective(w);
            }
            catch (const UnidentifiableError &)
            {
                // a 2-point rule can leave the FIM singular; reported as nan
            }
            os << n << "," << fmt(crb) << "," << fmt(m.power(w)) << "\n";
        }
    }

    void run_optimize(const ExperimentSpec &spec, std::ostream &os)
    {
        const SensingModel m = SensingModel::build(spec.scenario, spec.resolved_gl_points());
        const SmgdResult r = smgd(m, config_for(spec), spec.seed);
        preamble(os, spec, "iter,objective,grad_norm,step,fallback");
        for (const auto &rec : r.trace.records)
            os << rec.iteration << "," << fmt(rec.objective) << "," << fmt(rec.grad_norm) << "," << fmt(rec.step)
               << "," << (rec.fallback ? 1 : 0) << "\n";
        if (!spec.w_out.empty())
        {
            std::ofstream wf(spec.w_out);
            if (!wf)
                throw InvalidArgument("cannot write '" + spec.w_out + "'");
            wf << "# config_hash=" << config_hash_hex(spec.scenario) << " objective=" << fmt(r.objective) << "\n";
            wf << "re,im\n";
            for (Eigen::Index i = 0; i < r.w.size(); ++i)
                wf << fmt(r.w(i).real()) << "," << fmt(r.w(i).imag()) << "\n";
        }
    }

    void run_crb_map(const ExperimentSpec &spec, std::ostream &os)
    {
        preamble(os, spec, "x_m,z_m,log10_crb");
        const Scenario base = single_target(spec.scenario, spec.target);
        const int side = 20; // 400 points, as in the reference map
        for (double z : linspace(kMapZMin, kMapZMax, side))
            for (double x : linspace(kMapXMin, kMapXMax, side))
            {
                Scenario s = base;
                s.targets[0].position = Vec3(x, 0.0, z);
                const SensingModel m = SensingModel::build(s, spec.resolved_gl_points());
                // One target: Tr{CRB} is invariant to the phase of the single
                // weight, so any feasible w is optimal.
                CVector w(1);
                w(0) = std::sqrt(s.power_budget_A2 / m.B0()(0, 0).real());
                os << coord(x) << "," << coord(z) << "," << fmt(std::log10(m.objective(w))) << "\n";
            }
    }

    void run_mle_spectrum(const ExperimentSpec &spec, std::ostream &os)
    {
        const int gl = spec.resolved_gl_points();
        const SensingModel m = SensingModel::build(spec.scenario, gl);
        const CVector J = probing_current(spec, m);
        const double noise = spec.noiseless ? 0.0 : spec.scenario.noise_power;
        const MleWorkspace ws = MleWorkspace::simulate(spec.scenario, m.tx_grid(), m.rx_grid(), J, noise, spec.seed);
        preamble(os, spec, "axis,coordinate_m,spectrum_value");
        const double step = paper(spec) ? 0.005 : 0.01;
        const Vec3 r = spec.scenario.targets[spec.target].position;
        for (SweepAxis axis : {SweepAxis::X, SweepAxis::Z})
        {
            const int a = axis == SweepAxis::X ? 0 : 2;
            const double lo = axis == SweepAxis::Z ? std::max(0.05, r(a) - 1.0) : r(a) - 1.0;
            for (const auto &pt : spectrum_sweep(axis, lo, r(a) + 1.0, step, ws, spec.target))
                os << (axis == SweepAxis::X ? "x" : "z") << "," << coord(pt.candidate_position(a)) << ","
                   << fmt(pt.value) << "\n";
        }
    }

    void run_nmse_step(const ExperimentSpec &spec, std::ostream &os)
    {
        const SensingModel m = SensingModel::build(spec.scenario, spec.resolved_gl_points());
        const CVector J = probing_current(spec, m);
        NmseOptions opt;
        opt.trials = paper(spec) ? 50 : 5;
        opt.target_index = spec.target;
        std::vector<double> steps;
        const int count = paper(spec) ? 13 : 4;
        for (int i = 0; i < count; ++i)
            steps.push_back(std::pow(10.0, -3.0 + 3.0 * i / (count - 1)));
        preamble(os, spec, "step_m,nmse,nmse_x,nmse_z");
        for (const auto &p : nmse_vs_step(steps, spec.scenario, m.tx_grid(), m.rx_grid(), J, opt, spec.seed))
            os << coord(p.step) << "," << fmt(p.nmse) << "," << fmt(p.nmse_x) << "," << fmt(p.nmse_z) << "\n";
    }

    void run_sweep_power(const ExperimentSpec &spec, std::ostream &os)
    {
        preamble(os, spec, "targets,frequency_ghz,power_mA2,trace_crb");
        const SmgdConfig cfg = config_for(spec);
        for (std::size_t n_targets : {std::size_t{1}, spec.scenario.targets.size()})
        {
            Scenario s = spec.scenario;
            s.targets.resize(n_targets);
            for (double f_ghz : {28.0, 30.0})
            {
                const SensingModel m = SensingModel::build(s.with_frequency(f_ghz * 1e9), spec.resolved_gl_points());
                const Objective obj = make_objective(m);
                // Re-optimized at every power level (the model only depends
                // on the geometry, so it is built once per frequency).
                for (double p_ma2 : {25.0, 50.0, 100.0, 200.0, 400.0})
                {
                    double best = std::numeric_limits<double>::infinity();
                    for (int k = 0; k < spec.starts; ++k)
                    {
                        const CVector w0 = random_complex_normal(static_cast<Eigen::Index>(n_targets),
                                                                 spec.seed + static_cast<std::uint64_t>(k));
                        best = std::min(best, smgd(obj, m.B0(), p_ma2 * 1e-6, cfg, w0).objective);
                    }
                    os << n_targets << "," << coord(f_ghz) << "," << coord(p_ma2) << "," << fmt(best) << "\n";
                }
            }
            if (spec.scenario.targets.size() == 1)
                break;
        }
    }

    void run_sweep_frequency(const ExperimentSpec &spec, std::ostream &os)
    {
        preamble(os, spec, "targets,frequency_ghz,trace_crb");
        const SmgdConfig cfg = config_for(spec);
        for (std::size_t n_targets : {std::size_t{1}, spec.scenario.targets.size()})
        {
            Scenario s = spec.scenario;
            s.targets.resize(n_targets);
            for (double f_ghz = 24.0; f_ghz <= 32.0 + 1e-9; f_ghz += 1.0)
            {
                const SensingModel m = SensingModel::build(s.with_frequency(f_ghz * 1e9), spec.resolved_gl_points());
                const SmgdResult r = optimize_best(m, cfg, spec.seed, spec.starts);
                os << n_targets << "," << coord(f_ghz) << "," << fmt(r.objective) << "\n";
            }
            if (spec.scenario.targets.size() == 1)
                break;
        }
    }

    void run_compare_spda(const ExperimentSpec &spec, std::ostream &os)
    {
        preamble(os, spec, "architecture,tx_points,trace_crb,ratio_to_capa");
        const SmgdConfig cfg = config_for(spec);
        const SensingModel capa_model = SensingModel::build(spec.scenario, spec.resolved_gl_points());
        const double capa = optimize_best(capa_model, cfg, spec.seed, spec.starts).objective;
        const SensingModel spda_model = make_spda_model(spec.scenario);
        const double spda = optimize_best(spda_model, cfg, spec.seed, spec.starts).objective;
        os << "capa," << capa_model.tx_grid().size() << "," << fmt(capa) << ",1\n";
        os << "spda," << spda_model.tx_grid().size() << "," << fmt(spda) << "," << fmt(spda / capa) << "\n";
    }

    void run_robustness(const ExperimentSpec &spec, std::ostream &os)
    {
        preamble(os, spec, "axis,offset_m,crb_at_truth,ratio_to_nominal");
        const SmgdConfig cfg = config_for(spec);
        const int gl = spec.resolved_gl_points();
        const double nominal = crb_with_prior_error(spec.scenario, spec.target, Vec3::Zero(), gl, cfg, spec.seed,
                                                    spec.starts);
        const double step = paper(spec) ? 0.025 : 0.05;
        const char *names[] = {"x", "y", "z"};
        for (int a = 0; a < 3; ++a)
            for (int k = -static_cast<int>(std::lround(0.15 / step)); k <= std::lround(0.15 / step); ++k)
            {
                Vec3 off = Vec3::Zero();
                off(a) = k * step;
                const double crb = k == 0 ? nominal
                                          : crb_with_prior_error(spec.scenario, spec.target, off, gl, cfg,
                                                                 spec.seed, spec.starts);
                os << names[a] << "," << coord(off(a)) << "," << fmt(crb) << "," << fmt(crb / nominal) << "\n";
            }
    }

    void run_beam_pattern(const ExperimentSpec &spec, std::ostream &os)
    {
        const SensingModel m = SensingModel::build(spec.scenario, spec.resolved_gl_points());
        const CVector J = probing_current(spec, m);
        const int nx = paper(spec) ? 281 : 141;
        const int nz = paper(spec) ? 179 : 90;
        const BeamPattern bp = beam_pattern(J, m.tx_grid(), linspace(kMapXMin, kMapXMax, nx),
                                            linspace(kMapZMin, kMapZMax, nz), spec.scenario.constants.wavenumber_k0);
        preamble(os, spec, "x_m,z_m,value_normalized");
        for (std::size_t iz = 0; iz < bp.zs.size(); ++iz)
            for (std::size_t ix = 0; ix < bp.xs.size(); ++ix)
                os << coord(bp.xs[ix]) << "," << coord(bp.zs[iz]) << ","
                   << fmt(bp.values(static_cast<Eigen::Index>(iz), static_cast<Eigen::Index>(ix))) << "\n";
    }

    const std::vector<std::string> &experiment_kinds()
    {
        static const std::vector<std::string> kinds = {
            "gl-convergence", "optimize", "crb-map", "mle-spectrum", "nmse-step", "sweep-power",
            "sweep-frequency", "compare-spda", "robustness", "beam-pattern"};
        return kinds;
    }

    void run_experiment(const ExperimentSpec &spec, std::ostream &os)
    {
        spec.validate();
        const std::string &k = spec.kind;
        if (k == "gl-convergence")
            run_gl_convergence(spec, os);
        else if (k == "optimize")
            run_optimize(spec, os);
        else if (k == "crb-map")
            run_crb_map(spec, os);
        else if (k == "mle-spectrum")
            run_mle_spectrum(spec, os);
        else if (k == "nmse-step")
            run_nmse_step(spec, os);
        else if (k == "sweep-power")
            run_sweep_power(spec, os);
        else if (k == "sweep-frequency")
            run_sweep_frequency(spec, os);
        else if (k == "compare-spda")
            run_compare_spda(spec, os);
        else if (k == "robustness")
            run_robustness(spec, os);
        else if (k == "beam-pattern")
            run_beam_pattern(spec, os);
        else
            throw InvalidArgument("unknown experiment kind '" + k + "'");
    }

} // namespace capa
