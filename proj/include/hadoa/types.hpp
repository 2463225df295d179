// SPDX-License-Identifier: Apache-2.0
//
// hadoa - direction-of-arrival estimation for hybrid analog-digital arrays
// Copyright (C) 2026 The hadoa authors
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

#ifndef HADOA_TYPES_HPP
#define HADOA_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace hadoa
{
    using cplx = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using RVector = Eigen::VectorXd;
    using RMatrix = Eigen::MatrixXd;

    inline constexpr double pi = 3.14159265358979323846;

    inline double deg2rad(double deg) { return deg * pi / 180.0; }
    inline double rad2deg(double rad) { return rad * 180.0 / pi; }

    // Base of every error raised by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Argument outside the mathematical domain of an operation (angle range, K >= dimension, ...).
    class DomainError : public Error
    {
    public:
        using Error::Error;
    };

    // Mismatched matrix or vector dimensions.
    class DimensionError : public Error
    {
    public:
        using Error::Error;
    };

    // Invalid or unsatisfiable configuration (combiner constraints, plan sizes, config files).
    class ConfigError : public Error
    {
    public:
        using Error::Error;
    };

    // The stacked reconstruction operator is rank deficient or too ill-conditioned.
    class IdentifiabilityError : public Error
    {
    public:
        IdentifiabilityError(const std::string &what, int rank, int unknowns, double condition)
            : Error(what), numerical_rank(rank), unknowns(unknowns), condition_estimate(condition) {}
        int numerical_rank;
        int unknowns;
        double condition_estimate;
    };

    // Fewer local maxima than requested sources.
    class PeakDeficitError : public Error
    {
    public:
        PeakDeficitError(const std::string &what, int found, int requested)
            : Error(what), found(found), requested(requested) {}
        int found;
        int requested;
    };

    // A scan asked for more snapshot slots than the source can deliver.
    class ScanUnderrunError : public Error
    {
    public:
        using Error::Error;
    };
}

#endif
