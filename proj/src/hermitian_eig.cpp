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

#include "hadoa/hermitian_eig.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace hadoa
{
    namespace
    {
        double off_diagonal_norm(const CMatrix &a)
        {
            double s = 0.0;
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                for (Eigen::Index i = 0; i < a.rows(); ++i)
                    if (i != j)
                        s += std::norm(a(i, j));
            return std::sqrt(s);
        }
    }

    EigenDecomposition hermitian_eig(const CMatrix &r)
    {
        const Eigen::Index n = r.rows();
        if (n != r.cols() || n == 0)
            throw DomainError(fmt::format("eigendecomposition needs a square matrix, got {}x{}", r.rows(), r.cols()));
        if (!r.allFinite())
            throw DomainError("eigendecomposition input has non-finite entries");
        const double norm = r.norm();
        if ((r - r.adjoint()).norm() > hermitian_tolerance * std::max(norm, 1e-300))
            throw DomainError("eigendecomposition input is not Hermitian");

        CMatrix a = 0.5 * (r + r.adjoint());
        CMatrix v = CMatrix::Identity(n, n);
        const double stop = 1e-12 * norm;
        int sweep = 0;

        for (; sweep < 100 && off_diagonal_norm(a) > stop; ++sweep)
        {
            for (Eigen::Index p = 0; p < n - 1; ++p)
                for (Eigen::Index q = p + 1; q < n; ++q)
                {
                    const cplx b = a(p, q);
                    const double mag = std::abs(b);
                    if (mag == 0.0)
                        continue;
                    const cplx phase = b / mag; // e^{i phi}
                    const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
                    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = t * c;
                    const cplx sp = s * std::conj(phase);
                    const cplx cp = c * std::conj(phase);

                    // Columns p and q of A, then rows as conjugates.
                    for (Eigen::Index k = 0; k < n; ++k)
                    {
                        if (k == p || k == q)
                            continue;
                        const cplx akp = a(k, p), akq = a(k, q);
                        a(k, p) = c * akp - sp * akq;
                        a(k, q) = s * akp + cp * akq;
                        a(p, k) = std::conj(a(k, p));
                        a(q, k) = std::conj(a(k, q));
                    }
                    a(p, p) -= t * mag;
                    a(q, q) += t * mag;
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;

                    for (Eigen::Index k = 0; k < n; ++k)
                    {
                        const cplx vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = c * vkp - sp * vkq;
                        v(k, q) = s * vkp + cp * vkq;
                    }
                }
        }

        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });

        EigenDecomposition out;
        out.values.resize(n);
        out.vectors.resize(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const Eigen::Index src = order[static_cast<std::size_t>(j)];
            out.values(j) = a(src, src).real();
            out.vectors.col(j) = v.col(src);
        }
        out.sweeps = sweep;
        return out;
    }

    EigenDecomposition hermitian_eig(const CovarianceMatrix &r) { return hermitian_eig(r.data()); }

    CMatrix inverse_sqrt(const CMatrix &a)
    {
        const EigenDecomposition e = hermitian_eig(a);
        if (e.values(0) <= 1e-14 * std::max(1.0, std::abs(e.values(e.values.size() - 1))))
            throw DomainError("inverse square root of a singular matrix");
        const RVector d = e.values.array().rsqrt();
        CMatrix out = e.vectors * d.asDiagonal() * e.vectors.adjoint();
        return 0.5 * (out + out.adjoint());
    }
}
