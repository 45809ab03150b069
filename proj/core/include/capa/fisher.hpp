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

#ifndef CAPA_FISHER_HPP
#define CAPA_FISHER_HPP

#include "capa/channel.hpp"
#include "capa/geometry.hpp"
#include "capa/quadrature.hpp"
#include "capa/types.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace capa
{
    // Phase-conjugate transmit responses b(p) = [e^{j k0 |r_n - p|}]_n.
    struct SubspaceBasis
    {
        std::vector<Vec3> targets;
        double k0 = 0.0;

        SubspaceBasis() = default;
        SubspaceBasis(std::vector<Vec3> target_positions, double wavenumber)
            : targets(std::move(target_positions)), k0(wavenumber) {}

        std::size_t size() const { return targets.size(); }
        CVector operator()(const Vec3 &p) const;
    };

    // J(p) = b(p)^T w.
    CurrentFunction subspace_current(const SubspaceBasis &basis, const CVector &w);
    CVector subspace_current_samples(const SubspaceBasis &basis, const CVector &w, const QuadratureGrid &tx_grid);

    // Transmit-side integrals of the basis, computed once per geometry:
    //   b1(n, :)    = int a_t(r_n, p) b(p)^T dp
    //   b2[i](n, :) = int d/dr_{n,i} a_t(r_n, p) b(p)^T dp
    // so that for J = b^T w the moments are I1 = b1 w and I2(:, i) = b2[i] w.
    struct BasisIntegrals
    {
        CMatrix b1;
        std::array<CMatrix, 3> b2;

        std::size_t target_count() const { return static_cast<std::size_t>(b1.rows()); }
        TransmitMoments moments(const CVector &w) const;
    };

    BasisIntegrals compute_basis_integrals(const Scenario &s, const QuadratureGrid &tx_grid);

    // Gram matrix [B0]_{mn} = int conj(b_m) b_n dp. Hermitian positive definite
    // with every diagonal entry equal to the Tx area.
    CMatrix compute_B0(const Scenario &s, const QuadratureGrid &tx_grid);

    // Receive-side cross matrices. Parameters are ordered
    //   xi = [r_{1,x}, r_{1,y}, r_{1,z}, ..., Re a_1, Im a_1, ...]
    // (index 3n+i for positions, 3N+2n+j for reflections). For each receive
    // point q the derivative of E(q) along xi_m is g_m(q)^T w, and
    //   full.block(m N, n N, N, N) = int conj(g_m) g_n^T dq.
    // B1 is the position-position part, B2 the reflection-reflection part and
    // B3 the position-reflection part.
    struct CrossMatrices
    {
        std::size_t targets = 0;
        CMatrix B0;
        CMatrix full; // (5N * N) x (5N * N), Hermitian

        // full after a fixed real change of variables that subtracts from
        // each position derivative its least-squares fit by the reflection
        // derivatives. The position Schur complement is unchanged, but the
        // entries that cancel in it are far smaller, so Tr{CRB} and its
        // gradient are evaluated from this copy.
        CMatrix reduced;

        std::size_t parameter_count() const { return 5 * targets; }
        auto block(std::size_t m, std::size_t n) const
        {
            const auto N = static_cast<Eigen::Index>(targets);
            return full.block(static_cast<Eigen::Index>(m) * N, static_cast<Eigen::Index>(n) * N, N, N);
        }
        CMatrix B1() const;
        CMatrix B2() const;
        CMatrix B3() const;
    };

    // Fills cross.reduced from cross.full.
    void reduce_cross_matrices(CrossMatrices &cross);

    CrossMatrices compute_cross_matrices(const Scenario &s, const QuadratureGrid &rx_grid,
                                         const BasisIntegrals &integrals, const CMatrix &B0);

    struct FimBlocks
    {
        RMatrix F_rr; // 3N x 3N
        RMatrix F_ra; // 3N x 2N
        RMatrix F_aa; // 2N x 2N

        RMatrix full() const;
        static FimBlocks from_full(const RMatrix &F, std::size_t targets);
    };

    // [F]_{mn} = (2/sigma^2) Re Tr{W [full]_{mn}} for Hermitian PSD W.
    FimBlocks fim_blocks(const CMatrix &W, const CrossMatrices &cross, double noise_power);
    // Rank-one shortcut for W = w w^H.
    FimBlocks fim_blocks(const CVector &w, const CrossMatrices &cross, double noise_power);

    // FIM of an arbitrary current, from its transmit moments, by one pass
    // over the receive grid.
    FimBlocks fim_for_moments(const Scenario &s, const TransmitMoments &moments, const QuadratureGrid &rx_grid);

    struct CrbEvaluation
    {
        double trace = 0.0;   // Tr{CRB}
        RMatrix schur;        // K = F_rr - F_ra F_aa^{-1} F_ra^T
        RMatrix aa_inv_ar;    // F_aa^{-1} F_ra^T
        bool regularized = false; // ridge added to F_aa

        RMatrix crb() const;
    };

    // Throws UnidentifiableError when K is numerically singular.
    CrbEvaluation evaluate_crb(const FimBlocks &fim);

    double crb_trace(const CVector &w, const CrossMatrices &cross, double noise_power);

    // Gradient g with F(w + d) ~ F(w) + 2 Re{g^H d}. Writes F(w) to *value
    // when requested.
    CVector euclidean_grad_F(const CVector &w, const CrossMatrices &cross, double noise_power,
                             double *value = nullptr);

    // Everything needed to evaluate the objective for one scenario.
    class SensingModel
    {
    public:
        static SensingModel build(const Scenario &s);
        static SensingModel build(const Scenario &s, int gl_points);
        static SensingModel build(const Scenario &s, QuadratureGrid tx_grid, QuadratureGrid rx_grid);

        const Scenario &scenario() const { return scenario_; }
        const QuadratureGrid &tx_grid() const { return tx_grid_; }
        const QuadratureGrid &rx_grid() const { return rx_grid_; }
        const SubspaceBasis &basis() const { return basis_; }
        const BasisIntegrals &integrals() const { return integrals_; }
        const CrossMatrices &cross() const { return cross_; }
        const CMatrix &B0() const { return cross_.B0; }
        std::size_t target_count() const { return scenario_.targets.size(); }

        double objective(const CVector &w) const;
        CVector gradient(const CVector &w, double *value = nullptr) const;
        double power(const CVector &w) const { return (w.adjoint() * cross_.B0 * w)(0, 0).real(); }

        // Tr{CRB} of an arbitrary current sampled on the Tx grid.
        double crb_of_current(const CVector &current_samples) const;

    private:
        Scenario scenario_;
        QuadratureGrid tx_grid_;
        QuadratureGrid rx_grid_;
        SubspaceBasis basis_;
        BasisIntegrals integrals_;
        CrossMatrices cross_;
    };

    // Cross-matrix dumps for comparison with other implementations.
    // CSV columns: matrix,row,col,re,im (B0, B1, B2, B3; block matrices in
    // their expanded element indexing). Binary layout: the 8-byte magic
    // "CAPAXM01", uint64 N, then B0 (N x N) followed by the full
    // (5N^2 x 5N^2) matrix, both row-major as little-endian float64 (re, im)
    // pairs.
    void write_cross_matrices_csv(std::ostream &os, const CrossMatrices &cross);
    void write_cross_matrices_binary(std::ostream &os, const CrossMatrices &cross);
    CrossMatrices read_cross_matrices_binary(std::istream &is);

} // namespace capa

#endif
