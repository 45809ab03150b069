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

#include "capa/quadrature.hpp"

#include <random>

using namespace capa;

namespace
{
    // Exact integral of sum c_k x^k over [a, b].
    double poly_integral(const std::vector<double> &c, double a, double b)
    {
        double s = 0;
        for (std::size_t k = 0; k < c.size(); ++k)
            s += c[k] * (std::pow(b, k + 1.0) - std::pow(a, k + 1.0)) / (k + 1.0);
        return s;
    }
} // namespace

TEST_CASE("n-point rule integrates degree 2n-1 exactly")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int n : {1, 2, 3, 5, 10, 20, 64})
    {
        const auto rule = legendre_rule(n);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
        for (int trial = 0; trial < 5; ++trial)
        {
            std::vector<double> c(static_cast<std::size_t>(2 * n));
            for (auto &v : c)
                v = u(rng);
            double q = 0;
            for (int i = 0; i < n; ++i)
            {
                double px = 0;
                for (std::size_t k = c.size(); k-- > 0;)
                    px = px * rule.nodes[static_cast<std::size_t>(i)] + c[k];
                q += rule.weights[static_cast<std::size_t>(i)] * px;
            }
            CHECK(std::abs(q - poly_integral(c, -1, 1)) < 1e-12);
        }
    }
}

TEST_CASE("rule structure")
{
    for (int n : {2, 7, 120, 300})
    {
        const auto r = legendre_rule(n);
        double sum = 0;
        for (int i = 0; i < n; ++i)
        {
            const auto iu = static_cast<std::size_t>(i);
            sum += r.weights[iu];
            CHECK(r.weights[iu] > 0);
            CHECK(r.nodes[iu] == doctest::Approx(-r.nodes[static_cast<std::size_t>(n - 1 - i)]).epsilon(1e-14));
            if (i > 0)
                CHECK(r.nodes[iu] > r.nodes[iu - 1]);
        }
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    }
    // Known two-point rule.
    const auto r2 = legendre_rule(2);
    CHECK(r2.nodes[1] == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK_THROWS_AS(legendre_rule(0), InvalidArgument);
}

TEST_CASE("legendre recurrence values")
{
    double p, dp;
    legendre_eval(3, 0.5, p, dp);
    CHECK(p == doctest::Approx(0.5 * (5 * 0.125 - 3 * 0.5)));
    CHECK(dp == doctest::Approx(0.5 * (15 * 0.25 - 3)));
}

TEST_CASE("tensor grid over a rectangle")
{
    const Aperture ap = Aperture::make(-1, 0, -0.5, 0.5);
    const auto g = QuadratureGrid::gauss_legendre(ap, 6, 4);
    CHECK(g.size() == 24);
    CHECK(g.total_weight() == doctest::Approx(ap.area()).epsilon(1e-14));
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(ap.contains(g.position(i)));
    // x-major ordering
    CHECK(g.x(0) == g.x(3));
    CHECK(g.x(0) < g.x(4));
    // int x^3 y^2 over [-1,0] x [-.5,.5] = (-1/4) * (1/12)
    const cplx v = integrate_2d([](double x, double y) { return cplx(x * x * x * y * y, 0); }, g);
    CHECK(v.real() == doctest::Approx(-1.0 / 48).epsilon(1e-14));
    const CMatrix m = integrate_2d(
        [](double x, double y) {
            CMatrix r(1, 2);
            r << cplx(1, 0), cplx(x, y);
            return r;
        },
        g, 1, 2);
    CHECK(m(0, 0).real() == doctest::Approx(1.0));
    CHECK(m(0, 1).real() == doctest::Approx(-0.5));
    CHECK(std::abs(m(0, 1).imag()) < 1e-15);
}

TEST_CASE("oscillatory integral converges to the closed form")
{
    // int_0^1 e^{-j k x} dx at k = 586.76 (the reference wavenumber).
    const double k = 586.76;
    const Aperture ap = Aperture::make(0, 1, 0, 1);
    const cplx exact = (1.0 - std::exp(cplx(0, -k))) / cplx(0, k);
    const auto coarse = QuadratureGrid::gauss_legendre(ap, 20, 2);
    const auto fine = QuadratureGrid::gauss_legendre(ap, 300, 2);
    auto f = [k](double x, double) { return std::exp(cplx(0, -k * x)); };
    CHECK(std::abs(integrate_2d(f, fine) - exact) < 1e-12);
    CHECK(std::abs(integrate_2d(f, coarse) - exact) > 1e-4);
}

TEST_CASE("non-finite integrand is reported")
{
    const auto g = QuadratureGrid::gauss_legendre(Aperture::make(0, 1, 0, 1), 3, 3);
    CHECK_THROWS_AS(integrate_2d([](double x, double) { return cplx(x > 0.5 ? std::nan("") : 1.0, 0); }, g),
                    NumericError);
}

TEST_CASE("point grids keep their weights")
{
    const auto g = QuadratureGrid::from_points(Aperture::make(0, 1, 0, 1), {0.25, 0.75}, {0.5, 0.5}, {0.5, 0.5});
    CHECK(g.size() == 2);
    CHECK(g.total_weight() == doctest::Approx(1.0));
    CHECK_FALSE(g.rule_x().has_value());
    CHECK_THROWS_AS(QuadratureGrid::from_points(Aperture::make(0, 1, 0, 1), {0.1}, {0.1, 0.2}, {1.0}),
                    InvalidArgument);
}

TEST_CASE("copies share storage and stay valid")
{
    QuadratureGrid a = QuadratureGrid::gauss_legendre(Aperture::make(0, 1, 0, 1), 4, 4);
    QuadratureGrid b = a;
    a = QuadratureGrid();
    CHECK(b.size() == 16);
    CHECK(a.size() == 0);
}
