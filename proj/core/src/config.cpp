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

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace capa
{
    namespace
    {
        using nlohmann::json;

        const std::set<std::string> kKnownKeys = {
            "frequency_ghz", "tx_w_min", "tx_w_max", "tx_h_min", "tx_h_max", "rx_w_min",
            "rx_w_max", "rx_h_min", "rx_h_max", "power_mA2", "noise_power", "gl_points",
            "gl_points_x", "gl_points_y", "eta0", "targets"};

        double number(const json &j, const char *key, double fallback)
        {
            if (!j.contains(key))
                return fallback;
            if (!j.at(key).is_number())
                throw InvalidArgument(std::string("config key '") + key + "' must be a number");
            return j.at(key).get<double>();
        }

        int integer(const json &j, const char *key, int fallback)
        {
            if (!j.contains(key))
                return fallback;
            if (!j.at(key).is_number_integer())
                throw InvalidArgument(std::string("config key '") + key + "' must be an integer");
            return j.at(key).get<int>();
        }

        json to_json(const Scenario &s)
        {
            json j;
            j["frequency_ghz"] = s.constants.frequency_hz / 1e9;
            j["eta0"] = s.constants.impedance_eta0;
            j["tx_w_min"] = s.tx.w_min;
            j["tx_w_max"] = s.tx.w_max;
            j["tx_h_min"] = s.tx.h_min;
            j["tx_h_max"] = s.tx.h_max;
            j["rx_w_min"] = s.rx.w_min;
            j["rx_w_max"] = s.rx.w_max;
            j["rx_h_min"] = s.rx.h_min;
            j["rx_h_max"] = s.rx.h_max;
            j["power_mA2"] = s.power_budget_A2 * 1e6;
            j["noise_power"] = s.noise_power;
            j["gl_points_x"] = s.quad_points_x;
            j["gl_points_y"] = s.quad_points_y;
            json targets = json::array();
            for (const auto &t : s.targets)
                targets.push_back({{"position", {t.position.x(), t.position.y(), t.position.z()}},
                                   {"reflection_re", t.reflection.real()},
                                   {"reflection_im", t.reflection.imag()}});
            j["targets"] = targets;
            return j;
        }

        // Unit conversions (GHz, mA^2) do not round-trip bit for bit, so the
        // hash sees every number at 12 significant digits.
        void canonicalize(json &j)
        {
            if (j.is_number_float())
            {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.12g", j.get<double>());
                j = std::strtod(buf, nullptr);
            }
            else if (j.is_structured())
                for (auto &v : j)
                    canonicalize(v);
        }
    } // namespace

    Scenario scenario_from_json(const std::string &text)
    {
        json j;
        try
        {
            j = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object())
            throw InvalidArgument("config must be a JSON object");
        for (const auto &item : j.items())
            if (!kKnownKeys.count(item.key()))
                throw InvalidArgument("unknown config key '" + item.key() + "'");

        Scenario s = reference_scenario();
        const double eta0 = number(j, "eta0", s.constants.impedance_eta0);
        const double f_ghz = number(j, "frequency_ghz", s.constants.frequency_hz / 1e9);
        s.constants = PhysicalConstants::from_frequency(f_ghz * 1e9, eta0);
        s.tx = Aperture::make(number(j, "tx_w_min", s.tx.w_min), number(j, "tx_w_max", s.tx.w_max),
                              number(j, "tx_h_min", s.tx.h_min), number(j, "tx_h_max", s.tx.h_max));
        s.rx = Aperture::make(number(j, "rx_w_min", s.rx.w_min), number(j, "rx_w_max", s.rx.w_max),
                              number(j, "rx_h_min", s.rx.h_min), number(j, "rx_h_max", s.rx.h_max));
        s.power_budget_A2 = number(j, "power_mA2", s.power_budget_A2 * 1e6) * 1e-6;
        s.noise_power = number(j, "noise_power", s.noise_power);
        const int gl = integer(j, "gl_points", s.quad_points_x);
        s.quad_points_x = integer(j, "gl_points_x", gl);
        s.quad_points_y = integer(j, "gl_points_y", gl);

        if (j.contains("targets"))
        {
            const json &arr = j.at("targets");
            if (!arr.is_array())
                throw InvalidArgument("'targets' must be an array");
            std::vector<Target> targets;
            for (const auto &t : arr)
            {
                if (!t.contains("position") || !t.at("position").is_array() || t.at("position").size() != 3)
                    throw InvalidArgument("each target needs a 3-element 'position'");
                Target tg;
                for (int k = 0; k < 3; ++k)
                    tg.position(k) = t.at("position").at(static_cast<std::size_t>(k)).get<double>();
                tg.reflection = cplx(number(t, "reflection_re", 1.0), number(t, "reflection_im", 0.0));
                targets.push_back(tg);
            }
            s.targets = std::move(targets);
        }
        s.validate();
        return s;
    }

    Scenario load_scenario(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw InvalidArgument("cannot open config file '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return scenario_from_json(buf.str());
    }

    std::string scenario_to_json(const Scenario &s)
    {
        return to_json(s).dump(2);
    }

    std::uint64_t config_hash(const Scenario &s)
    {
        json j = to_json(s);
        canonicalize(j);
        const std::string canon = j.dump();
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char ch : canon)
        {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::string config_hash_hex(const Scenario &s)
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(s)));
        return buf;
    }

} // namespace capa
