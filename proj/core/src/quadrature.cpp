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

#include "capa/quadrature.hpp"
#include "capa/parallel.hpp"

#include <cmath>
#include <sstream>

namespace capa
{
    namespace
    {
        constexpr double kNewtonTolerance = 1e-14;
        constexpr int kNewtonMaxIterations = 100;

        [[noreturn]] void report_non_finite(double x, double y)
        {
            std::ostringstream os;
            os.precision(17);
            os << "non-finite integrand value at (x=" << x << ", y=" << y << ")";
            throw NumericError(os.str());
        }
    } // namespace

    void legendre_eval(int n, double x, double &p, double &dp)
    {
        double p0 = 1.0;
        double p1 = x;
        if (n == 0)
        {
            p = 1.0;
            dp = 0.0;
            return;
        }
        for (int k = 1; k < n; ++k)
        {
            const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        p = p1;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
    }

    GaussLegendreRule legendre_rule(int n)
    {
        if (n < 1)
            throw InvalidArgument("Gauss-Legendre order must be >= 1, got " + std::to_string(n));

        GaussLegendreRule rule;
        rule.order = n;
        rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
        rule.weights.assign(static_cast<std::size_t>(n), 0.0);

        // Roots come in +/- pairs; solve for the positive half and mirror.
        const int half = (n + 1) / 2;
        for (int i = 0; i < half; ++i)
        {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double p = 0.0, dp = 0.0;
            for (int it = 0; it < kNewtonMaxIterations; ++it)
            {
                legendre_eval(n, x, p, dp);
                const double dx = p / dp;
                x -= dx;
                if (std::abs(dx) < kNewtonTolerance)
                    break;
            }
            legendre_eval(n, x, p, dp);
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            const auto hi = static_cast<std::size_t>(n - 1 - i);
            const auto lo = static_cast<std::size_t>(i);
            rule.nodes[hi] = x;
            rule.nodes[lo] = -x;
            rule.weights[hi] = w;
            rule.weights[lo] = w;
        }
        if (n % 2 == 1)
            rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
        return rule;
    }

    QuadratureGrid QuadratureGrid::gauss_legendre(const Aperture &aperture, int nx, int ny)
    {
        if (!(aperture.w_min < aperture.w_max) || !(aperture.h_min < aperture.h_max))
            throw InvalidArgument("degenerate aperture");
        auto data = std::make_shared<Data>();
        data->aperture = aperture;
        data->tag = "gauss-legendre";
        data->rule_x = legendre_rule(nx);
        data->rule_y = legendre_rule(ny);

        // x = c x' + b with c = half-width, b = midpoint.
        const double cx = 0.5 * (aperture.w_max - aperture.w_min);
        const double bx = 0.5 * (aperture.w_max + aperture.w_min);
        const double cy = 0.5 * (aperture.h_max - aperture.h_min);
        const double by = 0.5 * (aperture.h_max + aperture.h_min);

        const auto total = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
        data->xs.reserve(total);
        data->ys.reserve(total);
        data->weights.reserve(total);
        for (int i = 0; i < nx; ++i)
        {
            const double xi = cx * data->rule_x->nodes[static_cast<std::size_t>(i)] + bx;
            const double wi = data->rule_x->weights[static_cast<std::size_t>(i)];
            for (int j = 0; j < ny; ++j)
            {
                data->xs.push_back(xi);
                data->ys.push_back(cy * data->rule_y->nodes[static_cast<std::size_t>(j)] + by);
                data->weights.push_back(wi * data->rule_y->weights[static_cast<std::size_t>(j)] * cx * cy);
            }
        }

        QuadratureGrid grid;
        grid.data_ = std::move(data);
        return grid;
    }

    QuadratureGrid QuadratureGrid::from_points(const Aperture &aperture, std::vector<double> xs,
                                               std::vector<double> ys, std::vector<double> weights,
                                               std::string tag)
    {
        if (xs.size() != ys.size() || xs.size() != weights.size())
            throw InvalidArgument("point grid coordinate/weight lengths differ");
        auto data = std::make_shared<Data>();
        data->aperture = aperture;
        data->tag = std::move(tag);
        data->xs = std::move(xs);
        data->ys = std::move(ys);
        data->weights = std::move(weights);
        QuadratureGrid grid;
        grid.data_ = std::move(data);
        return grid;
    }

    double QuadratureGrid::total_weight() const
    {
        return detail::block_reduce(size(), 0.0, [&](std::size_t begin, std::size_t end)
                                    {
            double s = 0.0;
            for (std::size_t i = begin; i < end; ++i)
                s += data_->weights[i];
            return s; });
    }

    cplx integrate_2d(const Integrand2d &f, const QuadratureGrid &grid)
    {
        return detail::block_reduce(grid.size(), cplx{}, [&](std::size_t begin, std::size_t end)
                                    {
            cplx s{};
            for (std::size_t i = begin; i < end; ++i)
            {
                const cplx v = f(grid.x(i), grid.y(i));
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    report_non_finite(grid.x(i), grid.y(i));
                s += grid.weight(i) * v;
            }
            return s; });
    }

    CMatrix integrate_2d(const MatrixIntegrand2d &f, const QuadratureGrid &grid, Eigen::Index rows,
                         Eigen::Index cols)
    {
        const CMatrix zero = CMatrix::Zero(rows, cols);
        return detail::block_reduce(grid.size(), zero, [&](std::size_t begin, std::size_t end)
                                    {
            CMatrix s = CMatrix::Zero(rows, cols);
            for (std::size_t i = begin; i < end; ++i)
            {
                const CMatrix v = f(grid.x(i), grid.y(i));
                if (v.rows() != rows || v.cols() != cols)
                    throw InvalidArgument("matrix integrand changed shape");
                if (!v.allFinite())
                    report_non_finite(grid.x(i), grid.y(i));
                s += grid.weight(i) * v;
            }
            return s; });
    }

} // namespace capa
