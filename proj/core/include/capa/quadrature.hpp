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

#ifndef CAPA_QUADRATURE_HPP
#define CAPA_QUADRATURE_HPP

#include "capa/geometry.hpp"
#include "capa/types.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace capa
{
    // n-point Gauss-Legendre rule on [-1, 1].
    struct GaussLegendreRule
    {
        int order = 0;
        std::vector<double> nodes;   // increasing, symmetric about 0
        std::vector<double> weights; // 2 / ((1 - x^2) P_n'(x)^2)
    };

    // Newton iteration on P_n (three-term recurrence) from Chebyshev-type
    // initial guesses. Throws InvalidArgument for n < 1.
    GaussLegendreRule legendre_rule(int n);

    // Legendre polynomial value and derivative at x, by recurrence.
    void legendre_eval(int n, double x, double &p, double &dp);

    // Weighted point set over an aperture. Either a tensor-product
    // Gauss-Legendre rule mapped to the rectangle, or an arbitrary list of
    // points (discrete arrays reuse every integral routine this way).
    // Copies share the immutable point storage.
    class QuadratureGrid
    {
    public:
        QuadratureGrid() = default;

        // Points are ordered x-major: index = i * ny + j.
        static QuadratureGrid gauss_legendre(const Aperture &aperture, int nx, int ny);

        static QuadratureGrid from_points(const Aperture &aperture, std::vector<double> xs,
                                          std::vector<double> ys, std::vector<double> weights,
                                          std::string tag = "points");

        std::size_t size() const { return data_ ? data_->weights.size() : 0; }
        double x(std::size_t i) const { return data_->xs[i]; }
        double y(std::size_t i) const { return data_->ys[i]; }
        double weight(std::size_t i) const { return data_->weights[i]; }
        Vec3 position(std::size_t i) const { return {data_->xs[i], data_->ys[i], 0.0}; }

        const Aperture &aperture() const { return data_->aperture; }
        const std::string &tag() const { return data_->tag; }
        const std::optional<GaussLegendreRule> &rule_x() const { return data_->rule_x; }
        const std::optional<GaussLegendreRule> &rule_y() const { return data_->rule_y; }

        // Sum of all weights (the aperture area for a Gauss-Legendre grid).
        double total_weight() const;

    private:
        struct Data
        {
            Aperture aperture;
            std::string tag;
            std::optional<GaussLegendreRule> rule_x;
            std::optional<GaussLegendreRule> rule_y;
            std::vector<double> xs;
            std::vector<double> ys;
            std::vector<double> weights;
        };
        std::shared_ptr<const Data> data_;
    };

    using Integrand2d = std::function<cplx(double x, double y)>;
    using MatrixIntegrand2d = std::function<CMatrix(double x, double y)>;

    // Sum of weight * f over the grid. Block-partitioned, reduced pairwise in
    // a fixed order. Throws NumericError naming the first non-finite sample.
    cplx integrate_2d(const Integrand2d &f, const QuadratureGrid &grid);

    // Elementwise accumulation of a matrix-valued integrand of fixed shape.
    CMatrix integrate_2d(const MatrixIntegrand2d &f, const QuadratureGrid &grid, Eigen::Index rows,
                         Eigen::Index cols);

} // namespace capa

#endif
