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

#include "hadoa/matrix_io.hpp"

#include <fmt/format.h>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hadoa
{
    void write_matrix_csv(std::ostream &os, const CMatrix &m, const std::string &kind, const std::string &spec)
    {
        os << fmt::format("# {} spec={} rows={} cols={}\n", kind, spec, m.rows(), m.cols());
        os << "r,c,re,im\n";
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                os << fmt::format("{},{},{:.17g},{:.17g}\n", i, j, m(i, j).real(), m(i, j).imag());
    }

    void write_combiner_csv(std::ostream &os, const Combiner &c)
    {
        write_matrix_csv(os, c.matrix(), "combiner", spec_to_string(c.spec()));
    }

    void write_matrix_csv(const std::string &path, const CMatrix &m, const std::string &kind, const std::string &spec)
    {
        std::ofstream os(path);
        if (!os)
            throw Error(fmt::format("cannot open '{}' for writing", path));
        write_matrix_csv(os, m, kind, spec);
        if (!os)
            throw Error(fmt::format("write to '{}' failed", path));
    }

    void write_combiner_csv(const std::string &path, const Combiner &c)
    {
        write_matrix_csv(path, c.matrix(), "combiner", spec_to_string(c.spec()));
    }

    MatrixFile read_matrix_csv(std::istream &is)
    {
        std::string header;
        if (!std::getline(is, header) || header.rfind("# ", 0) != 0)
            throw ConfigError("matrix CSV must start with a '# <kind> spec=... rows=... cols=...' line");
        std::istringstream hs(header.substr(2));
        MatrixFile out;
        long rows = -1, cols = -1;
        hs >> out.kind;
        std::string token;
        while (hs >> token)
        {
            const auto eq = token.find('=');
            if (eq == std::string::npos)
                continue;
            const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
            if (key == "spec")
                out.spec = value;
            else if (key == "rows")
                rows = std::stol(value);
            else if (key == "cols")
                cols = std::stol(value);
        }
        if (rows <= 0 || cols <= 0)
            throw ConfigError("matrix CSV header lacks positive rows= and cols=");

        std::string line;
        if (!std::getline(is, line) || line != "r,c,re,im")
            throw ConfigError("matrix CSV second line must be 'r,c,re,im'");

        out.matrix = CMatrix::Zero(rows, cols);
        std::vector<char> seen(static_cast<std::size_t>(rows * cols), 0);
        int line_no = 2;
        while (std::getline(is, line))
        {
            ++line_no;
            if (line.empty())
                continue;
            long r = 0, c = 0;
            double re = 0.0, im = 0.0;
            char extra = 0;
            if (std::sscanf(line.c_str(), "%ld,%ld,%lf,%lf%c", &r, &c, &re, &im, &extra) != 4)
                throw ConfigError(fmt::format("matrix CSV line {}: expected r,c,re,im", line_no));
            if (r < 0 || r >= rows || c < 0 || c >= cols)
                throw ConfigError(fmt::format("matrix CSV line {}: index ({}, {}) out of range", line_no, r, c));
            out.matrix(r, c) = cplx(re, im);
            seen[static_cast<std::size_t>(r * cols + c)] = 1;
        }
        for (char s : seen)
            if (!s)
                throw ConfigError("matrix CSV does not list every entry");
        return out;
    }

    MatrixFile read_matrix_csv(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw Error(fmt::format("cannot open '{}'", path));
        return read_matrix_csv(is);
    }

    Combiner read_combiner_csv(const std::string &path)
    {
        MatrixFile f = read_matrix_csv(path);
        if (f.kind != "combiner")
            throw ConfigError(fmt::format("'{}' holds a {}, not a combiner", path, f.kind));
        return Combiner(std::move(f.matrix), spec_from_string(f.spec));
    }
}
