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

#ifndef CAPA_CONFIG_HPP
#define CAPA_CONFIG_HPP

#include "capa/geometry.hpp"

#include <cstdint>
#include <string>

namespace capa
{
    // JSON scenario schema (every key optional; missing keys keep the
    // reference-configuration default):
    //   frequency_ghz, tx_w_min, tx_w_max, tx_h_min, tx_h_max,
    //   rx_w_min, rx_w_max, rx_h_min, rx_h_max, power_mA2, noise_power,
    //   gl_points (or gl_points_x / gl_points_y), eta0,
    //   targets: [{"position": [x, y, z], "reflection_re": .., "reflection_im": ..}]
    // Unknown keys are rejected so typos do not pass silently.
    Scenario scenario_from_json(const std::string &text);
    Scenario load_scenario(const std::string &path);
    std::string scenario_to_json(const Scenario &s);

    // FNV-1a over the canonical JSON form; stable across runs and platforms.
    std::uint64_t config_hash(const Scenario &s);
    std::string config_hash_hex(const Scenario &s);

} // namespace capa

#endif
