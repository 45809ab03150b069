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

#include "capa/config.hpp"
#include "capa/experiments.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    struct Options
    {
        std::string config;
        std::string out;
        std::uint64_t seed = 1;
        int gl_points = 0;
        std::string fidelity = "test";
        std::string rule = "FR";
        std::string policy = "optimized";
        std::string w_out;
        std::size_t target = 0;
        int starts = 3;
        bool noiseless = false;
    };

    void add_common(CLI::App *sub, Options &o)
    {
        sub->add_option("--config", o.config, "scenario JSON (defaults to the reference scenario)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output CSV path (stdout when omitted)");
        sub->add_option("--seed", o.seed, "random seed");
        sub->add_option("--gl-points", o.gl_points, "Gauss-Legendre points per axis (overrides fidelity)")
            ->check(CLI::Range(2, 4000));
        sub->add_option("--fidelity", o.fidelity, "test or paper")->check(CLI::IsMember({"test", "paper"}));
        sub->add_option("--rule", o.rule, "conjugate direction rule: FR, PR or plain")
            ->check(CLI::IsMember({"FR", "PR", "plain"}));
        sub->add_option("--starts", o.starts, "optimizer multi-start count")->check(CLI::PositiveNumber);
        sub->add_option("--target", o.target, "index of the target of interest");
        sub->add_option("--policy", o.policy, "probing current: optimized or random")
            ->check(CLI::IsMember({"optimized", "random"}));
        sub->add_option("--w-out", o.w_out, "write the optimized weights here (optimize)");
        sub->add_flag("--noiseless", o.noiseless, "simulate without receiver noise (mle-spectrum)");
    }

    int run(const std::string &kind, const Options &o)
    {
        capa::ExperimentSpec spec;
        spec.kind = kind;
        if (!o.config.empty())
            spec.scenario = capa::load_scenario(o.config);
        spec.seed = o.seed;
        spec.fidelity = capa::parse_fidelity(o.fidelity);
        if (o.gl_points > 0)
            spec.gl_points = o.gl_points;
        spec.rule = capa::parse_direction_rule(o.rule);
        spec.starts = o.starts;
        spec.policy = o.policy;
        spec.target = o.target;
        spec.w_out = o.w_out;
        spec.noiseless = o.noiseless;

        // Buffer the CSV so a failing run never leaves a partial file behind.
        std::ostringstream csv;
        capa::run_experiment(spec, csv);
        if (o.out.empty())
        {
            std::cout << csv.str();
            return 0;
        }
        std::ofstream f(o.out, std::ios::binary);
        if (!f)
            throw capa::InvalidArgument("cannot write '" + o.out + "'");
        f << csv.str();
        return f ? 0 : 1;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"CRB-optimal probing currents for continuous-aperture near-field sensing"};
    app.require_subcommand(1);
    Options opts;
    for (const auto &kind : capa::experiment_kinds())
        add_common(app.add_subcommand(kind, "run the " + kind + " experiment"), opts);

    CLI11_PARSE(app, argc, argv);

    try
    {
        return run(app.get_subcommands().front()->get_name(), opts);
    }
    catch (const capa::Error &e)
    {
        std::cerr << "capa: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "capa: unexpected failure: " << e.what() << "\n";
        return 3;
    }
}
