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

#include "capa/fisher.hpp"
#include "capa/optimizer.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

using namespace capa;

namespace
{
    const SensingModel &model(int n)
    {
        static std::map<int, SensingModel> cache;
        auto it = cache.find(n);
        if (it == cache.end())
            it = cache.emplace(n, SensingModel::build(reference_scenario(), n)).first;
        return it->second;
    }

    CVector feasible(const SensingModel &m, std::uint64_t seed)
    {
        return random_feasible_w(m.B0(), m.scenario().power_budget_A2, seed);
    }
} // namespace

TEST_CASE("B0 is Hermitian with the aperture area on its diagonal")
{
    const auto &m = model(120);
    const CMatrix &B0 = m.B0();
    for (Eigen::Index i = 0; i < B0.rows(); ++i)
        CHECK(std::abs(B0(i, i) - cplx(1.0, 0)) < 1e-10);
    CHECK((B0 - B0.adjoint()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(B0);
    CHECK(es.eigenvalues().minCoeff() > 0.5);
    // independent oracle for the off-diagonal entry
    const Scenario &s = m.scenario();
    const double k = s.constants.wavenumber_k0;
    const cplx b01 = oracle::integrate(m.tx_grid(), [&](const Vec3 &p) {
        return std::exp(cplx(0, -k * (s.targets[0].position - p).norm())) *
               std::exp(cplx(0, k * (s.targets[1].position - p).norm()));
    });
    CHECK(std::abs(B0(0, 1) - b01) < 1e-12);
}

TEST_CASE("blockwise FIM equals the dense double-quadrature oracle")
{
    for (std::size_t N : {std::size_t{1}, std::size_t{2}})
    {
        CAPTURE(N);
        Scenario s = reference_scenario();
        s.targets.resize(N);
        const SensingModel m = SensingModel::build(s, 24);
        const CVector w = random_feasible_w(m.B0(), s.power_budget_A2, 9);
        const RMatrix F = fim_blocks(w, m.cross(), s.noise_power).full();
        const CVector J = subspace_current_samples(m.basis(), w, m.tx_grid());
        const RMatrix Fo = oracle::dense_fim(s, m.tx_grid(), m.rx_grid(), J);
        CHECK(oracle::normalized_max_diff(F, Fo) < 1e-9);
        // the moment path over an arbitrary current agrees as well
        const RMatrix Fm = fim_for_moments(s, m.integrals().moments(w), m.rx_grid()).full();
        CHECK(oracle::normalized_max_diff(Fm, Fo) < 1e-9);
    }
}

TEST_CASE("Hermitian-weight FIM reduces to the rank-one form")
{
    const auto &m = model(40);
    const CVector w = feasible(m, 2);
    const CMatrix W = w * w.adjoint();
    const RMatrix a = fim_blocks(W, m.cross(), 5.6e-3).full();
    const RMatrix b = fim_blocks(w, m.cross(), 5.6e-3).full();
    CHECK((a - b).norm() < 1e-12 * b.norm());
    CHECK((a - a.transpose()).norm() < 1e-12 * a.norm());
}

TEST_CASE("Tr{CRB} from the reduced cross matrix matches the plain Schur complement")
{
    const auto &m = model(80);
    for (std::uint64_t seed : {1u, 2u, 3u})
    {
        const CVector w = feasible(m, seed);
        const double direct = evaluate_crb(fim_blocks(w, m.cross(), 5.6e-3)).trace;
        const double Fo = oracle::crb_trace_of_fim(fim_blocks(w, m.cross(), 5.6e-3).full(), 2);
        CHECK(m.objective(w) == doctest::Approx(direct).epsilon(1e-6));
        CHECK(m.objective(w) == doctest::Approx(Fo).epsilon(1e-6));
    }
}

TEST_CASE("objective scaling laws")
{
    const auto &m = model(80);
    const CVector w = feasible(m, 4);
    const double f = m.objective(w);
    CHECK(f > 0);
    // global phase does not matter, amplitude scales as 1/|c|^2
    CHECK(m.objective(w * std::polar(1.0, 0.7)) == doctest::Approx(f).epsilon(1e-9));
    CHECK(m.objective(2.0 * w) == doctest::Approx(f / 4).epsilon(1e-9));
    // and the gradient is homogeneous of degree -3
    CHECK((m.gradient(2.0 * w) * 8.0 - m.gradient(w)).norm() < 1e-8 * m.gradient(w).norm());
}

TEST_CASE("Euler identity: Re{g^H w} = -F")
{
    const auto &m = model(80);
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const CVector w = feasible(m, seed);
        double f = 0;
        const CVector g = m.gradient(w, &f);
        CHECK(f == doctest::Approx(m.objective(w)).epsilon(1e-12));
        CHECK(g.dot(w).real() == doctest::Approx(-f).epsilon(1e-9));
    }
}

TEST_CASE("analytic gradient matches central differences")
{
    const auto &m = model(80);
    const double h = 1e-7;
    for (std::uint64_t seed = 10; seed < 14; ++seed)
    {
        const CVector w = feasible(m, seed);
        const CVector g = m.gradient(w);
        CVector fd(w.size());
        for (Eigen::Index k = 0; k < w.size(); ++k)
        {
            CVector e = CVector::Zero(w.size());
            e(k) = h;
            const double dre = (m.objective(w + e) - m.objective(w - e)) / (2 * h);
            e(k) = cplx(0, h);
            const double dim = (m.objective(w + e) - m.objective(w - e)) / (2 * h);
            // F(w + d) ~ F + 2 Re{g^H d}
            fd(k) = cplx(dre, dim) / 2.0;
        }
        CHECK((fd - g).norm() < 1e-5 * g.norm());
    }
}

TEST_CASE("a receive kernel of the opposite phase convention leaves a single-target CRB unchanged")
{
    Scenario s = reference_scenario();
    s.targets.resize(1);
    const SensingModel m = SensingModel::build(s, 20);
    const CVector J = subspace_current_samples(m.basis(), random_feasible_w(m.B0(), s.power_budget_A2, 3), m.tx_grid());
    const double a = oracle::crb_trace_of_fim(oracle::dense_fim(s, m.tx_grid(), m.rx_grid(), J, false), 1);
    const double b = oracle::crb_trace_of_fim(oracle::dense_fim(s, m.tx_grid(), m.rx_grid(), J, true), 1);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
    CHECK(m.crb_of_current(J) == doctest::Approx(a).epsilon(1e-8));

    // With two targets the receive phases of the two echoes interfere, so
    // the convention does matter; logged for reference only.
    const Scenario s2 = reference_scenario();
    const SensingModel m2 = SensingModel::build(s2, 20);
    const CVector J2 =
        subspace_current_samples(m2.basis(), random_feasible_w(m2.B0(), s2.power_budget_A2, 3), m2.tx_grid());
    const double a2 = oracle::crb_trace_of_fim(oracle::dense_fim(s2, m2.tx_grid(), m2.rx_grid(), J2, false), 2);
    const double b2 = oracle::crb_trace_of_fim(oracle::dense_fim(s2, m2.tx_grid(), m2.rx_grid(), J2, true), 2);
    MESSAGE("two targets: relative change from conjugating the receive kernel " << std::abs(b2 / a2 - 1));
}

TEST_CASE("components orthogonal to the transmit responses only waste power")
{
    const auto &m = model(60);
    const Scenario &s = m.scenario();
    const auto &tx = m.tx_grid();
    const CVector w = feasible(m, 21);
    const CVector Jpar = subspace_current_samples(m.basis(), w, tx);

    // conj(a_t(r_n, .)) and conj of its position derivatives span the
    // directions a current must avoid to keep I1, I2 unchanged.
    std::vector<CVector> span;
    for (const auto &t : s.targets)
    {
        CVector a(static_cast<Eigen::Index>(tx.size()));
        std::array<CVector, 3> d;
        for (auto &v : d)
            v.resize(a.size());
        for (std::size_t i = 0; i < tx.size(); ++i)
        {
            const auto ii = static_cast<Eigen::Index>(i);
            a(ii) = std::conj(a_t(t.position, tx.position(i), s.constants));
            const CVec3 g = grad_a_t(t.position, tx.position(i), s.constants);
            for (int c = 0; c < 3; ++c)
                d[static_cast<std::size_t>(c)](ii) = std::conj(g(c));
        }
        span.push_back(a);
        for (auto &v : d)
            span.push_back(v);
    }
    span.push_back(Jpar);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    CVector v(static_cast<Eigen::Index>(tx.size()));
    for (auto &x : v)
        x = cplx(nd(rng), nd(rng));
    CVector Jperp = oracle::project_out(v, span, tx);
    Jperp *= std::sqrt(current_power(Jpar, tx) / current_power(Jperp, tx));
    const CVector Jaug = Jpar + Jperp;

    const auto m0 = transmit_moments(s.positions(), Jpar, tx, s.constants);
    const auto m1 = transmit_moments(s.positions(), Jaug, tx, s.constants);
    CHECK((m1.I1 - m0.I1).norm() < 1e-8 * m0.I1.norm());
    CHECK((m1.I2 - m0.I2).norm() < 1e-8 * m0.I2.norm());
    CHECK(current_power(Jaug, tx) > 1.9 * current_power(Jpar, tx));

    const double f_par = m.crb_of_current(Jpar);
    CHECK(m.crb_of_current(Jaug) == doctest::Approx(f_par).epsilon(1e-6));
    const CVector Jscaled = Jaug * std::sqrt(current_power(Jpar, tx) / current_power(Jaug, tx));
    CHECK(m.crb_of_current(Jscaled) > 1.5 * f_par);
}

TEST_CASE("a single transmit and receive point cannot localize")
{
    Scenario s = reference_scenario();
    s.targets.resize(1);
    const auto tx = QuadratureGrid::from_points(s.tx, {-0.5}, {0.0}, {1.0});
    const auto rx = QuadratureGrid::from_points(s.rx, {0.5}, {0.0}, {1.0});
    const SensingModel m = SensingModel::build(s, tx, rx);
    CVector w(1);
    w(0) = 0.01;
    CHECK_THROWS_AS(m.objective(w), UnidentifiableError);
}

TEST_CASE("cross-matrix dumps")
{
    const auto &m = model(20);
    std::stringstream bin;
    write_cross_matrices_binary(bin, m.cross());
    const CrossMatrices back = read_cross_matrices_binary(bin);
    CHECK(back.targets == 2);
    CHECK(back.full == m.cross().full);
    CHECK(back.B0 == m.B0());
    const CVector w = feasible(m, 1);
    CHECK(crb_trace(w, back, 5.6e-3) == doctest::Approx(m.objective(w)).epsilon(1e-12));

    std::stringstream bad("NOTCAPA0........");
    CHECK_THROWS_AS(read_cross_matrices_binary(bad), InvalidArgument);

    std::ostringstream csv;
    write_cross_matrices_csv(csv, m.cross());
    const std::string text = csv.str();
    CHECK(text.rfind("matrix,row,col,re,im\n", 0) == 0);
    const auto lines = std::count(text.begin(), text.end(), '\n');
    // B0: N^2, B1: (3N N)^2, B2: (2N N)^2, B3: 3N N * 2N N entries
    CHECK(lines == 1 + 4 + 144 + 64 + 96);
}
