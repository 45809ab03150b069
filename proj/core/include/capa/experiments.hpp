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

#ifndef CAPA_EXPERIMENTS_HPP
#define CAPA_EXPERIMENTS_HPP

#include "capa/geometry.hpp"
#include "capa/optimizer.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace capa
{
    enum class Fidelity
    {
        Test,  // GL 120, 20 x 20 maps, few trials
        Paper, // GL 300
    };

    Fidelity parse_fidelity(const std::string &name);

    struct ExperimentSpec
    {
        std::string kind;
        Scenario scenario = reference_scenario();
        std::uint64_t seed = 1;
        Fidelity fidelity = Fidelity::Test;
        std::optional<int> gl_points; // overrides the fidelity default
        DirectionRule rule = DirectionRule::FletcherReeves;
        int starts = 3;              // multi-start count for re-optimization
        std::string policy = "optimized"; // or "random" (mle-spectrum, beam-pattern)
        std::size_t target = 0;      // target of interest for single-target runs
        std::string w_out;           // optional CSV of the optimized w (optimize)
        bool noiseless = false;      // mle-spectrum

        int resolved_gl_points() const;
        void validate() const;
    };

    // Every runner writes a CSV with a "# config_hash=<hex>" comment line
    // followed by a header row. Output is deterministic for a given spec.
    void run_gl_convergence(const ExperimentSpec &spec, std::ostream &os);
    void run_optimize(const ExperimentSpec &spec, std::ostream &os);
    void run_crb_map(const ExperimentSpec &spec, std::ostream &os);
    void run_mle_spectrum(const ExperimentSpec &spec, std::ostream &os);
    void run_nmse_step(const ExperimentSpec &spec, std::ostream &os);
    void run_sweep_power(const ExperimentSpec &spec, std::ostream &os);
    void run_sweep_frequency(const ExperimentSpec &spec, std::ostream &os);
    void run_compare_spda(const ExperimentSpec &spec, std::ostream &os);
    void run_robustness(const ExperimentSpec &spec, std::ostream &os);
    void run_beam_pattern(const ExperimentSpec &spec, std::ostream &os);

    // Dispatches on spec.kind.
    void run_experiment(const ExperimentSpec &spec, std::ostream &os);

    const std::vector<std::string> &experiment_kinds();

    // Best of `starts` seeded SMGD runs (seeds seed, seed+1, ...).
    SmgdResult optimize_best(const SensingModel &model, const SmgdConfig &config, std::uint64_t seed, int starts);

    // Tr{CRB} at the true targets when the current is optimized for a prior
    // whose target `target` is displaced by `offset`.
    double crb_with_prior_error(const Scenario &s, std::size_t target, const Vec3 &offset, int gl_points,
                                const SmgdConfig &config, std::uint64_t seed, int starts);

} // namespace capa

#endif
