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

#ifndef HADOA_MATRIX_IO_HPP
#define HADOA_MATRIX_IO_HPP

#include "hadoa/combiner.hpp"
#include "hadoa/types.hpp"

#include <iosfwd>
#include <string>

namespace hadoa
{
    // Triplet CSV: a header line
    //   # <kind> spec=<text> rows=<r> cols=<c>
    // then "r,c,re,im" and one line per entry, values printed with %.17g so
    // that a write/read round trip is exact.
    void write_matrix_csv(std::ostream &os, const CMatrix &m, const std::string &kind, const std::string &spec);
    void write_combiner_csv(std::ostream &os, const Combiner &c);
    void write_combiner_csv(const std::string &path, const Combiner &c);
    void write_matrix_csv(const std::string &path, const CMatrix &m, const std::string &kind, const std::string &spec);

    struct MatrixFile
    {
        std::string kind;
        std::string spec;
        CMatrix matrix;
    };

    MatrixFile read_matrix_csv(std::istream &is);
    MatrixFile read_matrix_csv(const std::string &path);
    Combiner read_combiner_csv(const std::string &path);
}

#endif
