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

#include "capa/fisher.hpp"
#include "capa/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

namespace capa
{
    namespace
    {
        constexpr double kRidgeFactor = 1e-12;
        constexpr double kIdentifiabilityFactor = 1e-12;

        using Index = Eigen::Index;

        Index idx(std::size_t v) { return static_cast<Index>(v); }

        RMatrix symmetrize(const RMatrix &m) { return 0.5 * (m + m.transpose()); }

        void check_weights(const CVector &w, std::size_t targets)
        {
            if (static_cast<std::size_t>(w.size()) != targets)
                throw InvalidArgument("weight vector length " + std::to_string(w.size()) +
                                      " does not match target count " + std::to_string(targets));
        }

        auto block_of(const CMatrix &M, std::size_t N, Index m, Index n)
        {
            const Index k = idx(N);
            return M.block(m * k, n * k, k, k);
        }

        // Re Tr{W X} for each N x N block of M.
        RMatrix blockwise_trace(const CMatrix &W, const CMatrix &M, std::size_t N)
        {
            const Index P = 5 * idx(N);
            RMatrix F(P, P);
            for (Index m = 0; m < P; ++m)
                for (Index n = 0; n < P; ++n)
                    F(m, n) = (W.transpose().cwiseProduct(block_of(M, N, m, n))).sum().real();
            return F;
        }

        // Re{w^H X w} for each N x N block of M.
        RMatrix rank_one_form(const CVector &w, const CMatrix &M, std::size_t N)
        {
            const Index P = 5 * idx(N);
            RMatrix F(P, P);
            for (Index m = 0; m < P; ++m)
                for (Index n = 0; n < P; ++n)
                    F(m, n) = (w.adjoint() * block_of(M, N, m, n) * w)(0, 0).real();
            return F;
        }

        const CMatrix &objective_matrix(const CrossMatrices &cross)
        {
            return cross.reduced.size() ? cross.reduced : cross.full;
        }

        void write_f64(std::ostream &os, double v)
        {
            static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
            char buf[8];
            std::memcpy(buf, &v, 8);
            os.write(buf, 8);
        }

        double read_f64(std::istream &is)
        {
            char buf[8];
            if (!is.read(buf, 8))
                throw InvalidArgument("truncated cross-matrix dump");
            double v = 0.0;
            std::memcpy(&v, buf, 8);
            return v;
        }

        void write_matrix(std::ostream &os, const CMatrix &m)
        {
            for (Index r = 0; r < m.rows(); ++r)
                for (Index c = 0; c < m.cols(); ++c)
                {
                    write_f64(os, m(r, c).real());
                    write_f64(os, m(r, c).imag());
                }
        }

        CMatrix read_matrix(std::istream &is, Index rows, Index cols)
        {
            CMatrix m(rows, cols);
            for (Index r = 0; r < rows; ++r)
                for (Index c = 0; c < cols; ++c)
                {
                    const double re = read_f64(is);
                    m(r, c) = cplx(re, read_f64(is));
                }
            return m;
        }

        void csv_matrix(std::ostream &os, const char *name, const CMatrix &m)
        {
            char line[160];
            for (Index r = 0; r < m.rows(); ++r)
                for (Index c = 0; c < m.cols(); ++c)
                {
                    std::snprintf(line, sizeof line, "%s,%ld,%ld,%.17g,%.17g\n", name, static_cast<long>(r),
                                  static_cast<long>(c), m(r, c).real(), m(r, c).imag());
                    os << line;
                }
        }
    } // namespace

    CVector SubspaceBasis::operator()(const Vec3 &p) const
    {
        CVector b(idx(targets.size()));
        for (std::size_t n = 0; n < targets.size(); ++n)
            b(idx(n)) = std::polar(1.0, k0 * (targets[n] - p).norm());
        return b;
    }

    CurrentFunction subspace_current(const SubspaceBasis &basis, const CVector &w)
    {
        check_weights(w, basis.size());
        return CurrentFunction{[basis, w](const Vec3 &p)
                               { return basis(p).transpose() * w; },
                               "subspace(w)"};
    }

    CVector subspace_current_samples(const SubspaceBasis &basis, const CVector &w, const QuadratureGrid &tx_grid)
    {
        check_weights(w, basis.size());
        CVector out(idx(tx_grid.size()));
        for (std::size_t i = 0; i < tx_grid.size(); ++i)
            out(idx(i)) = basis(tx_grid.position(i)).transpose() * w;
        return out;
    }

    TransmitMoments BasisIntegrals::moments(const CVector &w) const
    {
        check_weights(w, target_count());
        TransmitMoments m;
        m.I1 = b1 * w;
        m.I2.resize(b1.rows(), 3);
        for (int ax = 0; ax < 3; ++ax)
            m.I2.col(ax) = b2[static_cast<std::size_t>(ax)] * w;
        return m;
    }

    BasisIntegrals compute_basis_integrals(const Scenario &s, const QuadratureGrid &tx_grid)
    {
        const std::size_t N = s.targets.size();
        if (N == 0)
            throw InvalidArgument("basis integrals need at least one target");
        const SubspaceBasis basis(s.positions(), s.constants.wavenumber_k0);
        const Index n = idx(N);
        // Stacked [b1; b2_x; b2_y; b2_z], 4N x N.
        const CMatrix zero = CMatrix::Zero(4 * n, n);
        const CMatrix acc = detail::block_reduce(tx_grid.size(), zero, [&](std::size_t begin, std::size_t end)
                                                 {
            CMatrix part = CMatrix::Zero(4 * n, n);
            for (std::size_t i = begin; i < end; ++i)
            {
                const Vec3 p = tx_grid.position(i);
                const CVector b = tx_grid.weight(i) * basis(p);
                for (Index t = 0; t < n; ++t)
                {
                    const Vec3 &r = basis.targets[static_cast<std::size_t>(t)];
                    part.row(t) += a_t(r, p, s.constants) * b.transpose();
                    const CVec3 g = grad_a_t(r, p, s.constants);
                    for (Index ax = 0; ax < 3; ++ax)
                        part.row((ax + 1) * n + t) += g(ax) * b.transpose();
                }
            }
            return part; });
        BasisIntegrals out;
        out.b1 = acc.topRows(n);
        for (Index ax = 0; ax < 3; ++ax)
            out.b2[static_cast<std::size_t>(ax)] = acc.middleRows((ax + 1) * n, n);
        return out;
    }

    CMatrix compute_B0(const Scenario &s, const QuadratureGrid &tx_grid)
    {
        const SubspaceBasis basis(s.positions(), s.constants.wavenumber_k0);
        const Index n = idx(basis.size());
        const CMatrix zero = CMatrix::Zero(n, n);
        CMatrix B0 = detail::block_reduce(tx_grid.size(), zero, [&](std::size_t begin, std::size_t end)
                                          {
            CMatrix part = CMatrix::Zero(n, n);
            for (std::size_t i = begin; i < end; ++i)
            {
                const CVector b = basis(tx_grid.position(i));
                part.noalias() += tx_grid.weight(i) * (b.conjugate() * b.transpose());
            }
            return part; });
        // Exact Hermitian symmetry: mirror the upper triangle.
        for (Index r = 0; r < n; ++r)
        {
            B0(r, r) = cplx(B0(r, r).real(), 0.0);
            for (Index c = r + 1; c < n; ++c)
                B0(c, r) = std::conj(B0(r, c));
        }
        return B0;
    }

    CMatrix CrossMatrices::B1() const
    {
        const Index n = idx(targets);
        return full.topLeftCorner(3 * n * n, 3 * n * n);
    }

    CMatrix CrossMatrices::B2() const
    {
        const Index n = idx(targets);
        return full.bottomRightCorner(2 * n * n, 2 * n * n);
    }

    CMatrix CrossMatrices::B3() const
    {
        const Index n = idx(targets);
        return full.topRightCorner(3 * n * n, 2 * n * n);
    }

    CrossMatrices compute_cross_matrices(const Scenario &s, const QuadratureGrid &rx_grid,
                                         const BasisIntegrals &integrals, const CMatrix &B0)
    {
        const std::size_t N = s.targets.size();
        if (integrals.target_count() != N)
            throw InvalidArgument("basis integrals do not match the target count");
        const Index n = idx(N);
        const Index len = 5 * n * n;
        const double gamma = round_trip_scale(N);

        const CMatrix zero = CMatrix::Zero(len, len);
        CMatrix full = detail::block_reduce(rx_grid.size(), zero, [&](std::size_t begin, std::size_t end)
                                            {
            CMatrix part = CMatrix::Zero(len, len);
            CVector G(len);
            for (std::size_t i = begin; i < end; ++i)
            {
                const Vec3 q = rx_grid.position(i);
                for (Index t = 0; t < n; ++t)
                {
                    const Target &tg = s.targets[static_cast<std::size_t>(t)];
                    const cplx ar = gamma * a_r(q, tg.position, s.constants);
                    const CVec3 gr = gamma * grad_a_r(q, tg.position, s.constants);
                    for (Index ax = 0; ax < 3; ++ax)
                    {
                        // g_m = h3 b1_n + h4 b2_{n,i}
                        const Index m = 3 * t + ax;
                        G.segment(m * n, n) =
                            tg.reflection * (gr(ax) * integrals.b1.row(t).transpose() +
                                             ar * integrals.b2[static_cast<std::size_t>(ax)].row(t).transpose());
                    }
                    const Index m = 3 * n + 2 * t;
                    G.segment(m * n, n) = ar * integrals.b1.row(t).transpose();
                    G.segment((m + 1) * n, n) = kJ * ar * integrals.b1.row(t).transpose();
                }
                part.noalias() += rx_grid.weight(i) * (G.conjugate() * G.transpose());
            }
            return part; });
        for (Index r = 0; r < len; ++r)
        {
            full(r, r) = cplx(full(r, r).real(), 0.0);
            for (Index c = r + 1; c < len; ++c)
                full(c, r) = std::conj(full(r, c));
        }
        CrossMatrices out;
        out.targets = N;
        out.B0 = B0;
        out.full = std::move(full);
        reduce_cross_matrices(out);
        return out;
    }

    void reduce_cross_matrices(CrossMatrices &cross)
    {
        const std::size_t N = cross.targets;
        const Index n = idx(N);
        const Index p = 3 * n; // position parameters
        const Index a = 2 * n; // reflection parameters
        // Real trace Gram of the parameter blocks: int <g_k, g_l> dq.
        RMatrix R(p + a, p + a);
        for (Index k = 0; k < p + a; ++k)
            for (Index l = 0; l < p + a; ++l)
                R(k, l) = block_of(cross.full, N, k, l).trace().real();
        // Position derivative m becomes g_m - sum_k c_{km} g_{p+k}; real
        // coefficients keep this an invertible change of parameters that
        // leaves the position Schur complement unchanged.
        const RMatrix C = R.bottomRightCorner(a, a).ldlt().solve(R.bottomLeftCorner(a, p));
        RMatrix T = RMatrix::Identity(p + a, p + a);
        T.bottomLeftCorner(a, p) = -C;
        if (!T.allFinite())
        {
            cross.reduced.resize(0, 0);
            return;
        }
        const CMatrix Tk = Eigen::kroneckerProduct(T, RMatrix::Identity(n, n)).eval().cast<cplx>();
        CMatrix red = Tk.transpose() * cross.full * Tk;
        const Index len = red.rows();
        for (Index r = 0; r < len; ++r)
        {
            red(r, r) = cplx(red(r, r).real(), 0.0);
            for (Index c = r + 1; c < len; ++c)
                red(c, r) = std::conj(red(r, c));
        }
        cross.reduced = std::move(red);
    }

    RMatrix FimBlocks::full() const
    {
        const Index p = F_rr.rows();
        const Index a = F_aa.rows();
        RMatrix F(p + a, p + a);
        F.topLeftCorner(p, p) = F_rr;
        F.topRightCorner(p, a) = F_ra;
        F.bottomLeftCorner(a, p) = F_ra.transpose();
        F.bottomRightCorner(a, a) = F_aa;
        return F;
    }

    FimBlocks FimBlocks::from_full(const RMatrix &F, std::size_t targets)
    {
        const Index p = 3 * idx(targets);
        const Index a = 2 * idx(targets);
        if (F.rows() != p + a || F.cols() != p + a)
            throw InvalidArgument("FIM shape does not match the target count");
        const RMatrix S = symmetrize(F);
        return FimBlocks{S.topLeftCorner(p, p), S.topRightCorner(p, a), S.bottomRightCorner(a, a)};
    }

    FimBlocks fim_blocks(const CMatrix &W, const CrossMatrices &cross, double noise_power)
    {
        if (W.rows() != idx(cross.targets) || W.cols() != idx(cross.targets))
            throw InvalidArgument("W must be N x N");
        if (!(noise_power > 0.0))
            throw InvalidArgument("noise power must be positive");
        return FimBlocks::from_full((2.0 / noise_power) * blockwise_trace(W, cross.full, cross.targets), cross.targets);
    }

    FimBlocks fim_blocks(const CVector &w, const CrossMatrices &cross, double noise_power)
    {
        check_weights(w, cross.targets);
        if (!(noise_power > 0.0))
            throw InvalidArgument("noise power must be positive");
        return FimBlocks::from_full((2.0 / noise_power) * rank_one_form(w, cross.full, cross.targets), cross.targets);
    }

    FimBlocks fim_for_moments(const Scenario &s, const TransmitMoments &moments, const QuadratureGrid &rx_grid)
    {
        const std::size_t N = s.targets.size();
        if (static_cast<std::size_t>(moments.I1.size()) != N || moments.I2.rows() != idx(N))
            throw InvalidArgument("transmit moments do not match the target count");
        const Index n = idx(N);
        const double gamma = round_trip_scale(N);
        const CMatrix zero = CMatrix::Zero(5 * n, 5 * n);
        const CMatrix acc = detail::block_reduce(rx_grid.size(), zero, [&](std::size_t begin, std::size_t end)
                                                 {
            CMatrix part = CMatrix::Zero(5 * n, 5 * n);
            CVector d(5 * n);
            for (std::size_t i = begin; i < end; ++i)
            {
                const Vec3 q = rx_grid.position(i);
                for (Index t = 0; t < n; ++t)
                {
                    const Target &tg = s.targets[static_cast<std::size_t>(t)];
                    const cplx ar = gamma * a_r(q, tg.position, s.constants);
                    const CVec3 gr = gamma * grad_a_r(q, tg.position, s.constants);
                    for (Index ax = 0; ax < 3; ++ax)
                        d(3 * t + ax) = tg.reflection * (gr(ax) * moments.I1(t) + ar * moments.I2(t, ax));
                    d(3 * n + 2 * t) = ar * moments.I1(t);
                    d(3 * n + 2 * t + 1) = kJ * ar * moments.I1(t);
                }
                part.noalias() += rx_grid.weight(i) * (d.conjugate() * d.transpose());
            }
            return part; });
        return FimBlocks::from_full((2.0 / s.noise_power) * acc.real(), N);
    }

    RMatrix CrbEvaluation::crb() const
    {
        return schur.ldlt().solve(RMatrix::Identity(schur.rows(), schur.cols()));
    }

    CrbEvaluation evaluate_crb(const FimBlocks &fim)
    {
        CrbEvaluation out;
        const Index a = fim.F_aa.rows();
        const double tr_aa = fim.F_aa.trace();
        if (!(tr_aa > 0.0) || !std::isfinite(tr_aa))
            throw UnidentifiableError("reflection-coefficient information is zero");

        RMatrix D = symmetrize(fim.F_aa);
        Eigen::SelfAdjointEigenSolver<RMatrix> eig_d(D);
        if (eig_d.eigenvalues().minCoeff() <= kRidgeFactor * tr_aa)
        {
            D += kRidgeFactor * tr_aa * RMatrix::Identity(a, a);
            out.regularized = true;
        }
        Eigen::LDLT<RMatrix> ldlt_d(D);
        out.aa_inv_ar = ldlt_d.solve(fim.F_ra.transpose());
        out.schur = symmetrize(fim.F_rr - fim.F_ra * out.aa_inv_ar);

        Eigen::SelfAdjointEigenSolver<RMatrix> eig_k(out.schur);
        const double scale = fim.F_rr.diagonal().maxCoeff();
        const double lmin = eig_k.eigenvalues().minCoeff();
        if (!(lmin > kIdentifiabilityFactor * scale))
            throw UnidentifiableError("position Schur complement is singular (min eigenvalue " +
                                      std::to_string(lmin) + ")");
        out.trace = eig_k.eigenvalues().cwiseInverse().sum();
        return out;
    }

    double crb_trace(const CVector &w, const CrossMatrices &cross, double noise_power)
    {
        check_weights(w, cross.targets);
        if (!(noise_power > 0.0))
            throw InvalidArgument("noise power must be positive");
        const RMatrix F = (2.0 / noise_power) * rank_one_form(w, objective_matrix(cross), cross.targets);
        return evaluate_crb(FimBlocks::from_full(F, cross.targets)).trace;
    }

    CVector euclidean_grad_F(const CVector &w, const CrossMatrices &cross, double noise_power, double *value)
    {
        check_weights(w, cross.targets);
        if (!(noise_power > 0.0))
            throw InvalidArgument("noise power must be positive");
        const CMatrix &M = objective_matrix(cross);
        const FimBlocks fim =
            FimBlocks::from_full((2.0 / noise_power) * rank_one_form(w, M, cross.targets), cross.targets);
        const CrbEvaluation ev = evaluate_crb(fim);
        if (value)
            *value = ev.trace;

        // dF = sum_mn Omega_mn dPhi_mn with Omega = [[-S, Y^T], [Y, -X]],
        // S = K^{-2}, Y = D^{-1} C^T S, X = Y C D^{-1}.
        const Index p = fim.F_rr.rows();
        const Index a = fim.F_aa.rows();
        const RMatrix Kinv = ev.crb();
        const RMatrix S = Kinv * Kinv;
        const RMatrix Y = ev.aa_inv_ar * S;
        const RMatrix X = Y * ev.aa_inv_ar.transpose();
        RMatrix Omega(p + a, p + a);
        Omega.topLeftCorner(p, p) = -S;
        Omega.topRightCorner(p, a) = Y.transpose();
        Omega.bottomLeftCorner(a, p) = Y;
        Omega.bottomRightCorner(a, a) = -symmetrize(X);

        const Index n = idx(cross.targets);
        CMatrix G = CMatrix::Zero(n, n);
        for (Index m = 0; m < p + a; ++m)
            for (Index k = 0; k < p + a; ++k)
                G += Omega(m, k) * block_of(M, cross.targets, m, k);
        return (2.0 / noise_power) * (G * w);
    }

    SensingModel SensingModel::build(const Scenario &s)
    {
        s.validate();
        return build(s, QuadratureGrid::gauss_legendre(s.tx, s.quad_points_x, s.quad_points_y),
                     QuadratureGrid::gauss_legendre(s.rx, s.quad_points_x, s.quad_points_y));
    }

    SensingModel SensingModel::build(const Scenario &s, int gl_points)
    {
        Scenario copy = s;
        copy.quad_points_x = gl_points;
        copy.quad_points_y = gl_points;
        return build(copy);
    }

    SensingModel SensingModel::build(const Scenario &s, QuadratureGrid tx_grid, QuadratureGrid rx_grid)
    {
        s.validate();
        if (tx_grid.size() == 0 || rx_grid.size() == 0)
            throw InvalidArgument("empty quadrature grid");
        SensingModel m;
        m.scenario_ = s;
        m.tx_grid_ = std::move(tx_grid);
        m.rx_grid_ = std::move(rx_grid);
        m.basis_ = SubspaceBasis(s.positions(), s.constants.wavenumber_k0);
        m.integrals_ = compute_basis_integrals(s, m.tx_grid_);
        m.cross_ = compute_cross_matrices(s, m.rx_grid_, m.integrals_, compute_B0(s, m.tx_grid_));
        return m;
    }

    double SensingModel::objective(const CVector &w) const
    {
        return crb_trace(w, cross_, scenario_.noise_power);
    }

    CVector SensingModel::gradient(const CVector &w, double *value) const
    {
        return euclidean_grad_F(w, cross_, scenario_.noise_power, value);
    }

    double SensingModel::crb_of_current(const CVector &current_samples) const
    {
        const TransmitMoments mom =
            transmit_moments(scenario_.positions(), current_samples, tx_grid_, scenario_.constants);
        return evaluate_crb(fim_for_moments(scenario_, mom, rx_grid_)).trace;
    }

    void write_cross_matrices_csv(std::ostream &os, const CrossMatrices &cross)
    {
        os << "matrix,row,col,re,im\n";
        csv_matrix(os, "B0", cross.B0);
        csv_matrix(os, "B1", cross.B1());
        csv_matrix(os, "B2", cross.B2());
        csv_matrix(os, "B3", cross.B3());
    }

    void write_cross_matrices_binary(std::ostream &os, const CrossMatrices &cross)
    {
        os.write("CAPAXM01", 8);
        const std::uint64_t n = cross.targets;
        char buf[8];
        std::memcpy(buf, &n, 8);
        os.write(buf, 8);
        write_matrix(os, cross.B0);
        write_matrix(os, cross.full);
    }

    CrossMatrices read_cross_matrices_binary(std::istream &is)
    {
        char magic[8];
        if (!is.read(magic, 8) || std::memcmp(magic, "CAPAXM01", 8) != 0)
            throw InvalidArgument("not a cross-matrix dump");
        char buf[8];
        if (!is.read(buf, 8))
            throw InvalidArgument("truncated cross-matrix dump");
        std::uint64_t n = 0;
        std::memcpy(&n, buf, 8);
        if (n == 0 || n > 1024)
            throw InvalidArgument("implausible target count in cross-matrix dump");
        CrossMatrices out;
        out.targets = static_cast<std::size_t>(n);
        const Index N = static_cast<Index>(n);
        out.B0 = read_matrix(is, N, N);
        out.full = read_matrix(is, 5 * N * N, 5 * N * N);
        reduce_cross_matrices(out);
        return out;
    }

} // namespace capa
