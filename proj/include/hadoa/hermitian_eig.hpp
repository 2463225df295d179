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

#ifndef HADOA_HERMITIAN_EIG_HPP
#define HADOA_HERMITIAN_EIG_HPP

#include "hadoa/array_model.hpp"
#include "hadoa/types.hpp"

namespace hadoa
{
    struct EigenDecomposition
    {
        RVector values;  // ascending
        CMatrix vectors; // column j belongs to values(j)
        int sweeps = 0;
    };

    // Cyclic complex Jacobi. Stops when the off-diagonal Frobenius mass drops
    // below 1e-12 * ||R||_F or after 100 sweeps. Throws DomainError for
    // non-square, non-finite or non-Hermitian input.
    EigenDecomposition hermitian_eig(const CMatrix &r);
    EigenDecomposition hermitian_eig(const CovarianceMatrix &r);

    // A^(-1/2) for Hermitian positive definite A.
    CMatrix inverse_sqrt(const CMatrix &a);
}

#endif
