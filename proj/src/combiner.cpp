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

#include "hadoa/combiner.hpp"
#include "hadoa/hermitian_eig.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <sstream>

namespace hadoa
{
    namespace
    {
        constexpr double modulus_tol = 1e-10;

        template <class... Ts>
        struct overloaded : Ts...
        {
            using Ts::operator()...;
        };
        template <class... Ts>
        overloaded(Ts...) -> overloaded<Ts...>;

        cplx dft_entry(int M, int m, int k)
        {
            const long long prod = (static_cast<long long>(m) * k) % M;
            return std::polar(1.0 / std::sqrt(static_cast<double>(M)), 2.0 * pi * static_cast<double>(prod) / M);
        }

        // Masks a phase source to the support and normalizes each column to unit norm.
        CMatrix fill_support(const std::vector<std::vector<bool>> &support, int M, int L,
                             const std::function<cplx(int, int)> &phase)
        {
            CMatrix w = CMatrix::Zero(M, L);
            for (int l = 0; l < L; ++l)
            {
                int count = 0;
                for (int m = 0; m < M; ++m)
                    count += support[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)] ? 1 : 0;
                const double scale = 1.0 / std::sqrt(static_cast<double>(count));
                for (int m = 0; m < M; ++m)
                    if (support[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)])
                    {
                        const cplx p = phase(m, l);
                        w(m, l) = scale * p / std::abs(p);
                    }
            }
            return w;
        }

        std::vector<std::vector<bool>> hds_switches(const DynamicSubarray &spec, int L)
        {
            const int S = spec.num_subarrays;
            std::vector<std::vector<bool>> sw(static_cast<std::size_t>(L), std::vector<bool>(static_cast<std::size_t>(S), false));
            int remaining = hds_closed_count(spec, L);
            for (int p = 0; p < S && remaining > 0; ++p)
                for (int l = 0; l < L && remaining > 0; ++l)
                {
                    const int s = ((l + p + spec.switch_offset) % S + S) % S;
                    auto &row = sw[static_cast<std::size_t>(l)];
                    if (!row[static_cast<std::size_t>(s)])
                    {
                        row[static_cast<std::size_t>(s)] = true;
                        --remaining;
                    }
                }
            return sw;
        }

        double parse_number(const std::string &key, const std::string &value)
        {
            std::size_t used = 0;
            double v = 0.0;
            try
            {
                v = std::stod(value, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used != value.size() || value.empty())
                throw ConfigError(fmt::format("combiner parameter {} has non-numeric value '{}'", key, value));
            return v;
        }

        int parse_int(const std::string &key, const std::string &value)
        {
            const double v = parse_number(key, value);
            if (v != std::floor(v))
                throw ConfigError(fmt::format("combiner parameter {} must be an integer, got '{}'", key, value));
            return static_cast<int>(v);
        }
    }

    std::string architecture_tag(const CombinerSpec &spec)
    {
        return std::visit(overloaded{[](const FullyConnected &) { return std::string("fc"); },
                                     [](const PartiallyConnected &) { return std::string("pc"); },
                                     [](const SwitchBased &) { return std::string("se"); },
                                     [](const DynamicSubarray &) { return std::string("hds"); }},
                          spec);
    }

    std::string spec_to_string(const CombinerSpec &spec)
    {
        return std::visit(overloaded{[](const FullyConnected &) { return std::string("fc"); },
                                     [](const PartiallyConnected &s) { return fmt::format("pc:subarray_size={}", s.subarray_size); },
                                     [](const SwitchBased &s)
                                     { return fmt::format("se:active_per_chain={}:allow_overlap={}", s.active_per_chain, s.allow_overlap ? 1 : 0); },
                                     [](const DynamicSubarray &s)
                                     {
                                         return fmt::format("hds:num_subarrays={}:closure_ratio={:.17g}:switch_offset={}",
                                                            s.num_subarrays, s.closure_ratio, s.switch_offset);
                                     }},
                          spec);
    }

    CombinerSpec spec_from_string(const std::string &text)
    {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':'))
            parts.push_back(item);
        if (parts.empty())
            throw ConfigError("empty combiner spec");

        const std::string &tag = parts[0];
        auto value_of = [&](const std::string &key, bool required) -> std::string
        {
            for (std::size_t i = 1; i < parts.size(); ++i)
            {
                const auto eq = parts[i].find('=');
                if (eq != std::string::npos && parts[i].substr(0, eq) == key)
                    return parts[i].substr(eq + 1);
            }
            if (required)
                throw ConfigError(fmt::format("combiner spec '{}' is missing {}", text, key));
            return {};
        };

        if (tag == "fc")
            return FullyConnected{};
        if (tag == "pc")
            return PartiallyConnected{parse_int("subarray_size", value_of("subarray_size", true))};
        if (tag == "se")
        {
            SwitchBased s;
            s.active_per_chain = parse_int("active_per_chain", value_of("active_per_chain", true));
            const std::string ov = value_of("allow_overlap", false);
            s.allow_overlap = !ov.empty() && parse_int("allow_overlap", ov) != 0;
            return s;
        }
        if (tag == "hds")
        {
            DynamicSubarray s;
            s.num_subarrays = parse_int("num_subarrays", value_of("num_subarrays", true));
            s.closure_ratio = parse_number("closure_ratio", value_of("closure_ratio", true));
            const std::string off = value_of("switch_offset", false);
            s.switch_offset = off.empty() ? 0 : parse_int("switch_offset", off);
            return s;
        }
        throw ConfigError(fmt::format("unknown combiner architecture '{}'", tag));
    }

    int hds_closed_count(const DynamicSubarray &spec, int num_chains)
    {
        return static_cast<int>(std::floor(spec.closure_ratio * num_chains * spec.num_subarrays + 0.5));
    }

    Combiner::Combiner(CMatrix matrix, CombinerSpec spec) : matrix_(std::move(matrix)), spec_(std::move(spec))
    {
        if (matrix_.rows() == 0 || matrix_.cols() == 0)
            throw DimensionError("combiner matrix must be non-empty");
        if (!matrix_.allFinite())
            throw DomainError("combiner matrix has non-finite entries");
        const Eigen::Index L = matrix_.cols();
        column_normalized_ = (matrix_.adjoint() * matrix_ - CMatrix::Identity(L, L)).norm() <= 1e-10;
    }

    void check_spec(const CombinerSpec &spec, int M, int L)
    {
        if (M < 1 || L < 1)
            throw ConfigError(fmt::format("combiner needs M >= 1 and L >= 1, got M={} L={}", M, L));
        if (L > M)
            throw ConfigError(fmt::format("RF chain count L={} exceeds antenna count M={}", L, M));
        std::visit(overloaded{[](const FullyConnected &) {},
                              [&](const PartiallyConnected &s)
                              {
                                  if (s.subarray_size < 1 || s.subarray_size * L != M)
                                      throw ConfigError(fmt::format(
                                          "partially connected: subarray_size * L must equal M ({} * {} != {})",
                                          s.subarray_size, L, M));
                              },
                              [&](const SwitchBased &s)
                              {
                                  if (s.active_per_chain < 1 || s.active_per_chain > M)
                                      throw ConfigError(fmt::format(
                                          "switch based: active_per_chain must be in [1, M], got {}", s.active_per_chain));
                                  if (!s.allow_overlap && s.active_per_chain * L > M)
                                      throw ConfigError(fmt::format(
                                          "switch based: disjoint blocks need active_per_chain * L <= M ({} * {} > {})",
                                          s.active_per_chain, L, M));
                              },
                              [&](const DynamicSubarray &s)
                              {
                                  if (s.num_subarrays < 1 || M % s.num_subarrays != 0)
                                      throw ConfigError(fmt::format(
                                          "dynamic subarray: num_subarrays must divide M (M={}, num_subarrays={})",
                                          M, s.num_subarrays));
                                  if (!(s.closure_ratio > 0.0 && s.closure_ratio <= 1.0))
                                      throw ConfigError(fmt::format(
                                          "dynamic subarray: closure_ratio must be in (0, 1], got {}", s.closure_ratio));
                                  const int closed = hds_closed_count(s, L);
                                  if (closed < L)
                                      throw ConfigError(fmt::format(
                                          "dynamic subarray: closure_ratio * L * num_subarrays rounds to {} closed switches, need >= L = {}",
                                          closed, L));
                              }},
                   spec);
    }

    std::vector<std::vector<bool>> default_support(const CombinerSpec &spec, int M, int L)
    {
        check_spec(spec, M, L);
        std::vector<std::vector<bool>> sup(static_cast<std::size_t>(M), std::vector<bool>(static_cast<std::size_t>(L), false));
        auto set = [&](int m, int l) { sup[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)] = true; };
        std::visit(overloaded{[&](const FullyConnected &)
                              {
                                  for (int m = 0; m < M; ++m)
                                      for (int l = 0; l < L; ++l)
                                          set(m, l);
                              },
                              [&](const PartiallyConnected &s)
                              {
                                  for (int l = 0; l < L; ++l)
                                      for (int i = 0; i < s.subarray_size; ++i)
                                          set(l * s.subarray_size + i, l);
                              },
                              [&](const SwitchBased &s)
                              {
                                  const int a = s.active_per_chain;
                                  for (int l = 0; l < L; ++l)
                                  {
                                      int start = l * a;
                                      if (s.allow_overlap && a * L > M)
                                          start = L > 1 ? static_cast<int>((static_cast<long long>(l) * (M - a)) / (L - 1)) : 0;
                                      for (int i = 0; i < a; ++i)
                                          set(start + i, l);
                                  }
                              },
                              [&](const DynamicSubarray &s)
                              {
                                  const int size = M / s.num_subarrays;
                                  const auto sw = hds_switches(s, L);
                                  for (int l = 0; l < L; ++l)
                                      for (int k = 0; k < s.num_subarrays; ++k)
                                          if (sw[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)])
                                              for (int i = 0; i < size; ++i)
                                                  set(k * size + i, l);
                              }},
                   spec);
        return sup;
    }

    Combiner build_combiner(const CombinerSpec &spec, int M, int L, std::uint64_t /*seed*/)
    {
        const auto support = default_support(spec, M, L);
        CMatrix w;
        if (std::holds_alternative<SwitchBased>(spec))
            w = fill_support(support, M, L, [](int, int) { return cplx(1.0, 0.0); });
        else
            w = fill_support(support, M, L,
                             [&](int m, int l)
                             {
                                 const int k = static_cast<int>((static_cast<long long>(l) * M) / L);
                                 return dft_entry(M, m, k);
                             });
        Combiner c(std::move(w), spec);
        const auto problems = validate(c);
        if (!problems.empty())
            throw ConfigError(fmt::format("built combiner violates its constraints: {}", problems.front()));
        return c;
    }

    SnapshotMatrix apply_combiner(const Combiner &c, const SnapshotMatrix &x)
    {
        if (x.domain != Domain::antenna)
            throw DimensionError("combiner input must be antenna-domain snapshots");
        if (x.rows() != c.num_antennas())
            throw DimensionError(fmt::format("combiner expects {} antenna rows, got {}", c.num_antennas(), x.rows()));
        SnapshotMatrix y;
        y.domain = Domain::rf_chain;
        y.data.noalias() = c.matrix().adjoint() * x.data;
        return y;
    }

    CVector effective_steering(const Combiner &c, const ArrayGeometry &geometry, double angle_deg)
    {
        if (geometry.num_elements() != c.num_antennas())
            throw DimensionError(fmt::format("combiner has {} antennas, geometry {}", c.num_antennas(), geometry.num_elements()));
        return c.matrix().adjoint() * steering_vector(geometry, angle_deg);
    }

    std::vector<std::string> validate(const Combiner &c)
    {
        std::vector<std::string> out;
        const CMatrix &w = c.matrix();
        const int M = c.num_antennas();
        const int L = c.num_chains();

        for (int l = 0; l < L; ++l)
            if (w.col(l).cwiseAbs().maxCoeff() == 0.0)
                out.push_back(fmt::format("column {} is all zero", l));

        auto nz = [&](int m, int l) { return std::abs(w(m, l)) > modulus_tol; };

        std::visit(
            overloaded{
                [&](const FullyConnected &)
                {
                    const double target = 1.0 / std::sqrt(static_cast<double>(M));
                    for (int l = 0; l < L; ++l)
                        for (int m = 0; m < M; ++m)
                            if (std::abs(std::abs(w(m, l)) - target) > modulus_tol)
                            {
                                out.push_back(fmt::format("fully connected: entry ({}, {}) has modulus {:.6g}, expected unit modulus 1/sqrt(M) = {:.6g}",
                                                          m, l, std::abs(w(m, l)), target));
                                return;
                            }
                },
                [&](const PartiallyConnected &s)
                {
                    if (s.subarray_size * L != M)
                    {
                        out.push_back(fmt::format("partially connected: subarray_size * L = {} * {} != M = {}", s.subarray_size, L, M));
                        return;
                    }
                    const double target = 1.0 / std::sqrt(static_cast<double>(s.subarray_size));
                    for (int l = 0; l < L; ++l)
                        for (int m = 0; m < M; ++m)
                        {
                            const bool inside = m / s.subarray_size == l;
                            if (!inside && nz(m, l))
                            {
                                out.push_back(fmt::format("partially connected: support violation, entry ({}, {}) outside block {}", m, l, l));
                                return;
                            }
                            if (inside && std::abs(std::abs(w(m, l)) - target) > modulus_tol)
                            {
                                out.push_back(fmt::format("partially connected: entry ({}, {}) has modulus {:.6g}, expected {:.6g}",
                                                          m, l, std::abs(w(m, l)), target));
                                return;
                            }
                        }
                },
                [&](const SwitchBased &s)
                {
                    const double target = 1.0 / std::sqrt(static_cast<double>(s.active_per_chain));
                    std::vector<int> used(static_cast<std::size_t>(M), 0);
                    for (int l = 0; l < L; ++l)
                    {
                        int count = 0;
                        for (int m = 0; m < M; ++m)
                        {
                            if (!nz(m, l))
                                continue;
                            ++count;
                            ++used[static_cast<std::size_t>(m)];
                            if (std::abs(w(m, l) - cplx(target, 0.0)) > modulus_tol)
                            {
                                out.push_back(fmt::format("switch based: entry ({}, {}) is not in {{0, {:.6g}}}", m, l, target));
                                return;
                            }
                        }
                        if (count != s.active_per_chain)
                        {
                            out.push_back(fmt::format("switch based: column {} has {} active antennas, expected {}", l, count, s.active_per_chain));
                            return;
                        }
                    }
                    if (!s.allow_overlap)
                        for (int m = 0; m < M; ++m)
                            if (used[static_cast<std::size_t>(m)] > 1)
                            {
                                out.push_back(fmt::format("switch based: antenna {} feeds {} chains but overlap is not allowed", m, used[static_cast<std::size_t>(m)]));
                                return;
                            }
                },
                [&](const DynamicSubarray &s)
                {
                    if (s.num_subarrays < 1 || M % s.num_subarrays != 0)
                    {
                        out.push_back(fmt::format("dynamic subarray: num_subarrays = {} does not divide M = {}", s.num_subarrays, M));
                        return;
                    }
                    const int size = M / s.num_subarrays;
                    int closed = 0;
                    for (int l = 0; l < L; ++l)
                    {
                        int active = 0;
                        for (int k = 0; k < s.num_subarrays; ++k)
                        {
                            int on = 0;
                            for (int i = 0; i < size; ++i)
                                on += nz(k * size + i, l) ? 1 : 0;
                            if (on != 0 && on != size)
                            {
                                out.push_back(fmt::format("dynamic subarray: support violation, chain {} connects {} of {} antennas of subarray {}", l, on, size, k));
                                return;
                            }
                            if (on == size)
                            {
                                ++closed;
                                active += size;
                            }
                        }
                        if (active == 0)
                            continue;
                        const double target = 1.0 / std::sqrt(static_cast<double>(active));
                        for (int m = 0; m < M; ++m)
                            if (nz(m, l) && std::abs(std::abs(w(m, l)) - target) > modulus_tol)
                            {
                                out.push_back(fmt::format("dynamic subarray: entry ({}, {}) has modulus {:.6g}, expected {:.6g}", m, l, std::abs(w(m, l)), target));
                                return;
                            }
                    }
                    const int expected = hds_closed_count(s, L);
                    if (closed != expected)
                        out.push_back(fmt::format("dynamic subarray: {} closed switches, closure_ratio {} requires {} (round half up of {:.6g})",
                                                  closed, s.closure_ratio, expected, s.closure_ratio * L * s.num_subarrays));
                    if (closed < L)
                        out.push_back(fmt::format("dynamic subarray: {} closed switches, need at least L = {}", closed, L));
                }},
            c.spec());
        return out;
    }

    Combiner quantize_phases(const Combiner &c, int bits)
    {
        if (bits < 1)
            throw DomainError(fmt::format("phase quantization needs at least 1 bit, got {}", bits));
        if (bits >= 53)
            return c;
        const double step = 2.0 * pi / std::ldexp(1.0, bits);
        CMatrix w = c.matrix();
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i)
            {
                const double mag = std::abs(w(i, j));
                if (mag == 0.0)
                    continue;
                const double q = std::round(std::arg(w(i, j)) / step) * step;
                w(i, j) = std::polar(mag, q);
            }
        return Combiner(std::move(w), c.spec());
    }

    CMatrix whitening_matrix(const Combiner &c)
    {
        const Eigen::Index L = c.num_chains();
        if (c.column_normalized())
            return CMatrix::Identity(L, L);
        return inverse_sqrt(c.matrix().adjoint() * c.matrix());
    }

    Combiner random_phase_combiner(int M, int L, std::uint64_t seed)
    {
        Rng rng(seed);
        return random_support_combiner(FullyConnected{}, M, L, rng);
    }

    Combiner random_support_combiner(const CombinerSpec &spec, int M, int L, Rng &rng)
    {
        if (std::holds_alternative<SwitchBased>(spec))
            throw ConfigError("switch-based combiners have no phase shifters; use selection_combiner");
        const auto support = default_support(spec, M, L);
        CMatrix w = CMatrix::Zero(M, L);
        // Draw every entry so the stream does not depend on the support.
        for (int l = 0; l < L; ++l)
            for (int m = 0; m < M; ++m)
                w(m, l) = std::polar(1.0, 2.0 * pi * rng.uniform());
        return Combiner(fill_support(support, M, L, [&](int m, int l) { return w(m, l); }), spec);
    }

    Combiner dft_combiner(int M, const std::vector<int> &columns, const std::vector<cplx> &phases)
    {
        if (columns.empty())
            throw ConfigError("DFT combiner needs at least one column");
        if (!phases.empty() && phases.size() != columns.size())
            throw DimensionError("DFT combiner phases must match the column count");
        const int L = static_cast<int>(columns.size());
        CMatrix w(M, L);
        for (int l = 0; l < L; ++l)
        {
            const int k = ((columns[static_cast<std::size_t>(l)] % M) + M) % M;
            const cplx ph = phases.empty() ? cplx(1.0, 0.0) : phases[static_cast<std::size_t>(l)];
            for (int m = 0; m < M; ++m)
                w(m, l) = ph * dft_entry(M, m, k);
        }
        return Combiner(std::move(w), FullyConnected{});
    }

    Combiner selection_combiner(int M, const std::vector<std::vector<int>> &rows, bool allow_overlap)
    {
        if (rows.empty())
            throw ConfigError("selection combiner needs at least one column");
        const int L = static_cast<int>(rows.size());
        const std::size_t a = rows[0].size();
        CMatrix w = CMatrix::Zero(M, L);
        for (int l = 0; l < L; ++l)
        {
            const auto &r = rows[static_cast<std::size_t>(l)];
            if (r.size() != a || a == 0)
                throw ConfigError("selection combiner columns must select the same positive number of antennas");
            for (int m : r)
            {
                if (m < 0 || m >= M)
                    throw ConfigError(fmt::format("selected antenna {} outside [0, {})", m, M));
                w(m, l) = 1.0 / std::sqrt(static_cast<double>(a));
            }
        }
        return Combiner(std::move(w), SwitchBased{static_cast<int>(a), allow_overlap});
    }

    Combiner hds_combiner(int M, int num_subarrays, const std::vector<std::vector<bool>> &switches,
                          const CMatrix &phases, int switch_offset)
    {
        if (num_subarrays < 1 || M % num_subarrays != 0)
            throw ConfigError(fmt::format("dynamic subarray: num_subarrays must divide M (M={}, num_subarrays={})", M, num_subarrays));
        const int L = static_cast<int>(switches.size());
        if (phases.rows() != M || phases.cols() != L)
            throw DimensionError("HDS phases must be M x L");
        const int size = M / num_subarrays;
        std::vector<std::vector<bool>> support(static_cast<std::size_t>(M), std::vector<bool>(static_cast<std::size_t>(L), false));
        int closed = 0;
        for (int l = 0; l < L; ++l)
        {
            if (switches[static_cast<std::size_t>(l)].size() != static_cast<std::size_t>(num_subarrays))
                throw DimensionError("HDS switch pattern rows must have num_subarrays entries");
            for (int k = 0; k < num_subarrays; ++k)
                if (switches[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)])
                {
                    ++closed;
                    for (int i = 0; i < size; ++i)
                        support[static_cast<std::size_t>(k * size + i)][static_cast<std::size_t>(l)] = true;
                }
        }
        DynamicSubarray spec{num_subarrays, static_cast<double>(closed) / (static_cast<double>(L) * num_subarrays), switch_offset};
        return Combiner(fill_support(support, M, L, [&](int m, int l) { return phases(m, l); }), spec);
    }

    SnapshotMatrix observe(const Combiner &c, const SignalBlock &block, const NoiseSpec &noise, Rng &rng)
    {
        if (block.steering.rows() != c.num_antennas())
            throw DimensionError("signal block and combiner disagree on the antenna count");
        const Eigen::Index L = c.num_chains();
        const Eigen::Index n = block.waveforms.cols();
        CMatrix white(L, n);
        for (Eigen::Index t = 0; t < n; ++t)
            for (Eigen::Index l = 0; l < L; ++l)
                white(l, t) = rng.complex_normal(noise.variance());
        SnapshotMatrix y;
        y.domain = Domain::rf_chain;
        if (c.column_normalized())
            y.data = std::move(white);
        else
        {
            const CMatrix gram = c.matrix().adjoint() * c.matrix();
            const Eigen::LLT<CMatrix> llt(gram);
            if (llt.info() != Eigen::Success)
                throw DomainError("combiner columns are linearly dependent; combined noise has no Cholesky factor");
            y.data = llt.matrixL() * white;
        }
        if (block.waveforms.rows() > 0)
            y.data.noalias() += (c.matrix().adjoint() * block.steering) * block.waveforms;
        return y;
    }
}
