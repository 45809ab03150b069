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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "capa/baselines.hpp"

using namespace capa;

namespace
{
    std::vector<double> span(double lo, double hi, int n)
    {
        std::vector<double> v;
        for (int i = 0; i < n; ++i)
            v.push_back(lo + (hi - lo) * i / (n - 1));
        return v;
    }
} // namespace

TEST_CASE("random policy has constant modulus and seeded phase")
{
    const Scenario s = reference_scenario();
    const auto tx = QuadratureGrid::gauss_legendre(s.tx, 40, 40);
    const auto J1 = random_policy_current(s.tx, 1, s.power_budget_A2);
    const auto J2 = random_policy_current(s.tx, 2, s.power_budget_A2);
    const CVector a = sample_current(J1, tx), b = sample_current(J2, tx);
    CHECK(current_power(a, tx) == doctest::Approx(s.power_budget_A2).epsilon(1e-12));
    CHECK(current_power(b, tx) == doctest::Approx(s.power_budget_A2).epsilon(1e-12));
    CHECK((a - b).norm() > 0.1 * a.norm());
    CHECK(sample_current(J1, tx) == a);
    CHECK(std::abs(random_policy_current(s.tx, 1)(Vec3(-0.5, 0, 0))) == doctest::Approx(1.0));
    // phases spread over the whole circle
    double mean_re = 0;
    for (auto v : a)
        mean_re += v.real();
    CHECK(std::abs(mean_re / a.size()) < 0.05 * std::abs(a(0)));
}

TEST_CASE("half-wavelength array layout")
{
    const Scenario s = reference_scenario();
    const SpdaArray arr = make_spda_array(s.tx, s.constants.wavelength_m);
    CHECK(static_cast<int>(1.0 / (s.constants.wavelength_m / 2)) == 186);
    CHECK(arr.size() == 186u * 186u);
    CHECK(arr.spacing == doctest::Approx(s.constants.wavelength_m / 2));
    CHECK(arr.element_area == doctest::Approx(s.constants.wavelength_m * s.constants.wavelength_m / (4 * kPi)));
    for (const auto &p : arr.element_positions)
        CHECK(s.tx.contains(p));
    const auto g = arr.as_grid();
    CHECK(g.size() == arr.size());
    CHECK(g.total_weight() == doctest::Approx(arr.size() * arr.element_area));
    Scenario tiny = s;
    tiny.tx = Aperture::make(-0.001, 0.0, -0.001, 0.001);
    CHECK(make_spda_array(tiny.tx, s.constants.wavelength_m).size() == 0);
    CHECK_THROWS_AS(make_spda_model(tiny), InvalidArgument);
}

TEST_CASE("discrete sums converge to the aperture integrals")
{
    Scenario s = reference_scenario();
    s.tx = Aperture::make(-0.2, 0.0, -0.1, 0.1);
    s.rx = Aperture::make(0.0, 0.2, -0.1, 0.1);
    const SensingModel capa_m = SensingModel::build(s, 80);
    const CVector w = random_feasible_w(capa_m.B0(), s.power_budget_A2, 2);
    const double ref = capa_m.objective(w);
    // Pitches that tile the 0.2 m side exactly, so only the midpoint-rule
    // error remains; it should fall roughly fourfold per halving.
    std::vector<double> errs;
    for (int n : {50, 100, 200})
    {
        const double pitch = 0.2 / n;
        const SensingModel m = make_spda_model(s, {pitch, pitch * pitch});
        errs.push_back(std::abs(m.objective(w) / ref - 1));
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[2] < errs[1]);
    CHECK(errs[1] / errs[2] > 3.0);
    CHECK(errs[2] < 1e-3);
}

TEST_CASE("array sums at the quadrature pitch reproduce the continuous value")
{
    const Scenario s = reference_scenario();
    const SensingModel capa_m = SensingModel::build(s, 120);
    const CVector w = random_feasible_w(capa_m.B0(), s.power_budget_A2, 5);
    const double pitch = 1.0 / 150;
    const SensingModel m = make_spda_model(s, {pitch, pitch * pitch});
    CHECK(m.objective(w) == doctest::Approx(capa_m.objective(w)).epsilon(1e-2));
}

TEST_CASE("single-element arrays are unidentifiable")
{
    Scenario s = reference_scenario();
    s.targets.resize(1);
    s.tx = Aperture::make(-0.006, 0.0, -0.003, 0.003);
    s.rx = Aperture::make(0.0, 0.006, -0.003, 0.003);
    const SensingModel m = make_spda_model(s);
    CHECK(m.tx_grid().size() == 1);
    CHECK(m.rx_grid().size() == 1);
    CVector w(1);
    w(0) = 1.0;
    CHECK_THROWS_AS(m.objective(w), UnidentifiableError);
}

TEST_CASE("beam pattern focuses on the phase-conjugated target")
{
    const Scenario s = reference_scenario();
    const SensingModel m = SensingModel::build(s, 60);
    const auto xs = span(-7, 7, 141);
    const auto zs = span(0.1, 9, 90);
    for (Eigen::Index n = 0; n < 2; ++n)
    {
        CVector w = CVector::Zero(2);
        w(n) = 1.0;
        const CVector J = subspace_current_samples(m.basis(), w, m.tx_grid());
        const BeamPattern bp = beam_pattern(J, m.tx_grid(), xs, zs, s.constants.wavenumber_k0);
        CHECK(bp.values.maxCoeff() == doctest::Approx(1.0));
        CHECK(bp.values.minCoeff() >= 0.0);
        const Vec3 pk = beam_peak(bp);
        const Vec3 r = s.targets[static_cast<std::size_t>(n)].position;
        CHECK(std::abs(pk.x() - r.x()) <= 0.1 + 1e-9);
        CHECK(std::abs(pk.z() - r.z()) <= 0.1 + 1e-9);
        const BeamPattern rotated = beam_pattern(J * std::polar(1.0, 1.3), m.tx_grid(), xs, zs,
                                                 s.constants.wavenumber_k0);
        CHECK((rotated.values - bp.values).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("optimized single-target current peaks at the target")
{
    Scenario s = reference_scenario();
    s.targets.resize(1);
    const SensingModel m = SensingModel::build(s, 60);
    const SmgdResult r = smgd(m, SmgdConfig{}, std::uint64_t{1});
    const CVector J = subspace_current_samples(m.basis(), r.w, m.tx_grid());
    const auto xs = span(-7, 7, 141);
    const auto zs = span(0.1, 9, 90);
    const Vec3 pk = beam_peak(beam_pattern(J, m.tx_grid(), xs, zs, s.constants.wavenumber_k0));
    CHECK(std::abs(pk.x() + 5) <= 0.1 + 1e-9);
    CHECK(std::abs(pk.z() - 5) <= 0.1 + 1e-9);
}

TEST_CASE("optimized discrete array does worse than the continuous aperture")
{
    Scenario s = reference_scenario();
    s.tx = Aperture::make(-0.5, 0.0, -0.25, 0.25);
    s.rx = Aperture::make(0.0, 0.5, -0.25, 0.25);
    const SensingModel capa_m = SensingModel::build(s, 100);
    const double capa = smgd(capa_m, SmgdConfig{}, std::uint64_t{1}).objective;
    const double spda = spda_crb(s, SmgdConfig{}, 1, 1);
    CHECK(spda > capa);
}
