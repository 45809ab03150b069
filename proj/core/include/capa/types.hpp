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

#ifndef CAPA_TYPES_HPP
#define CAPA_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace capa
{
    using cplx = std::complex<double>;
    using Vec3 = Eigen::Vector3d;
    using CVec3 = Eigen::Vector3cd;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using RVector = Eigen::VectorXd;
    using RMatrix = Eigen::MatrixXd;

    inline constexpr double kPi = std::numbers::pi;
    inline constexpr cplx kJ{0.0, 1.0};

    // Base class of every error raised by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Precondition violated by the caller (bad shape, bad order, bad config value).
    class InvalidArgument : public Error
    {
    public:
        using Error::Error;
    };

    // Two points closer than the kernel singularity guard.
    class SingularityError : public Error
    {
    public:
        using Error::Error;
    };

    // Non-finite value encountered while integrating or evaluating.
    class NumericError : public Error
    {
    public:
        using Error::Error;
    };

    // Fisher information (or a Gram matrix) too close to singular to invert.
    class UnidentifiableError : public Error
    {
    public:
        using Error::Error;
    };

} // namespace capa

#endif
