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

#include "capa/geometry.hpp"

using namespace capa;

TEST_CASE("reference scenario constants")
{
    const Scenario s = reference_scenario();
    CHECK(s.constants.frequency_hz == doctest::Approx(28e9));
    CHECK(s.constants.wavelength_m == doctest::Approx(2.998e8 / 28e9).epsilon(1e-12));
    CHECK(s.constants.wavelength_m == doctest::Approx(0.010707).epsilon(1e-4));
    CHECK(s.constants.wavenumber_k0 == doctest::Approx(586.82).epsilon(1e-5));
    CHECK(s.tx.area() == doctest::Approx(1.0));
    CHECK(s.rx.area() == doctest::Approx(1.0));
    REQUIRE(s.targets.size() == 2);
    CHECK(s.targets[0].position.isApprox(Vec3(-5, 0, 5)));
    CHECK(s.targets[1].position.isApprox(Vec3(5, 0, 5)));
    CHECK(s.targets[0].reflection == cplx(10, 10));
    CHECK(s.power_budget_A2 == doctest::Approx(1e-4));
    CHECK(s.noise_power == doctest::Approx(5.6e-3));
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("wavelength and frequency constructors agree")
{
    const auto a = PhysicalConstants::from_frequency(30e9);
    const auto b = PhysicalConstants::from_wavelength(a.wavelength_m);
    CHECK(b.frequency_hz == doctest::Approx(30e9).epsilon(1e-12));
    CHECK(a.wavenumber_k0 * a.wavelength_m == doctest::Approx(2 * kPi));
    CHECK_THROWS_AS(PhysicalConstants::from_frequency(0.0), InvalidArgument);
    CHECK_THROWS_AS(PhysicalConstants::from_wavelength(-1.0), InvalidArgument);
}

TEST_CASE("scenario validation rejects broken invariants")
{
    Scenario s = reference_scenario();
    SUBCASE("target behind the array")
    {
        s.targets[0].position.z() = 0.0;
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
    }
    SUBCASE("coincident targets")
    {
        s.targets[1].position = s.targets[0].position;
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
    }
    SUBCASE("no targets")
    {
        s.targets.clear();
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
    }
    SUBCASE("non-finite reflection")
    {
        s.targets[0].reflection = cplx(std::nan(""), 0);
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
    }
    SUBCASE("non-positive power")
    {
        s.power_budget_A2 = 0;
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
    }
    SUBCASE("one quadrature point")
    {
        s.quad_points_x = 1;
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
    }
    CHECK_THROWS_AS(Aperture::make(0, 0, 0, 1), InvalidArgument);
}

TEST_CASE("copies with other targets or frequency")
{
    const Scenario s = reference_scenario();
    const Scenario one = s.with_targets({s.targets[1]});
    CHECK(one.targets.size() == 1);
    CHECK(one.tx.area() == s.tx.area());
    const Scenario f = s.with_frequency(30e9);
    CHECK(f.constants.wavelength_m < s.constants.wavelength_m);
    CHECK(f.targets.size() == 2);
}

TEST_CASE("near-field admissibility of the reference targets")
{
    const auto diag = admissibility_check(reference_scenario());
    REQUIRE(diag.size() == 2);
    for (const auto &d : diag)
    {
        // D = sqrt(2) m, so 2 D^2 / lambda is about 374 m.
        CHECK(d.fraunhofer_bound_m == doctest::Approx(4.0 / 0.0107071).epsilon(1e-3));
        CHECK(d.range_m == doctest::Approx(std::sqrt(50.0)));
        CHECK(d.in_radiating_near_field);
        CHECK_FALSE(d.possibly_reactive);
    }
    Scenario s = reference_scenario();
    s.targets[0].position = Vec3(0, 0, 0.02);
    CHECK(admissibility_check(s)[0].possibly_reactive);
    s.targets[0].position = Vec3(0, 0, 1000);
    CHECK_FALSE(admissibility_check(s)[0].in_radiating_near_field);
}

TEST_CASE("aperture helpers")
{
    const Aperture a = Aperture::make(-1, 0, -0.5, 0.5);
    CHECK(a.center().isApprox(Vec3(-0.5, 0, 0)));
    CHECK(a.diagonal() == doctest::Approx(std::sqrt(2.0)));
    CHECK(a.contains(Vec3(-0.2, 0.3, 0)));
    CHECK_FALSE(a.contains(Vec3(0.2, 0.3, 0)));
}
