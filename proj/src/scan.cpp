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

#include "hadoa/scan.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numeric>

namespace hadoa
{
    namespace
    {
        double sin_to_deg(double u) { return rad2deg(std::asin(std::clamp(u, -1.0, 1.0))); }

        // Packs beam columns into combiners of at most L columns.
        template <class MakeCombiner>
        std::vector<Combiner> pack(int num_beams, int L, MakeCombiner make)
        {
            std::vector<Combiner> out;
            for (int first = 0; first < num_beams; first += L)
                out.push_back(make(first, std::min(L, num_beams - first)));
            return out;
        }

        std::vector<int> top_indices(const std::vector<double> &v, int count)
        {
            std::vector<int> idx(v.size());
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[static_cast<std::size_t>(a)] > v[static_cast<std::size_t>(b)]; });
            idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(std::max(count, 0))));
            return idx;
        }
    }

    double half_power_width_sin(int n, double spacing)
    {
        if (n <= 1)
            return std::numeric_limits<double>::infinity();
        auto af = [&](double u)
        {
            const double x = pi * spacing * u;
            return std::pow(std::sin(n * x) / (n * std::sin(x)), 2);
        };
        double lo = 1e-12, hi = 1.0 / (n * spacing);
        for (int i = 0; i < 200; ++i)
        {
            const double mid = 0.5 * (lo + hi);
            (af(mid) > 0.5 ? lo : hi) = mid;
        }
        return lo + hi; // 2 * half width
    }

    int coarse_subaperture(const ArrayGeometry &geometry, int num_sectors)
    {
        if (num_sectors < 1)
            throw ConfigError(fmt::format("coarse scan needs at least one sector, got {}", num_sectors));
        const int M = geometry.num_elements();
        const double sector = 2.0 / num_sectors;
        for (int n = M; n >= 1; --n)
            if (M % n == 0 && half_power_width_sin(n, geometry.spacing()) >= sector)
                return n;
        return 1;
    }

    ScanCodebook build_coarse_codebook(const ArrayGeometry &geometry, int L, int num_sectors)
    {
        const int M = geometry.num_elements();
        if (L < 1 || L > M)
            throw ConfigError(fmt::format("coarse codebook needs 1 <= L <= M, got L = {}", L));
        const int mw = coarse_subaperture(geometry, num_sectors);
        const int subarrays = M / mw;

        ScanCodebook cb;
        cb.stage = ScanStage::coarse;
        cb.active_elements = mw;
        cb.beam_spacing_sin = 2.0 / num_sectors;
        for (int s = 0; s < num_sectors; ++s)
            cb.beam_centers_deg.push_back(sin_to_deg(-1.0 + (2.0 * s + 1.0) / num_sectors));

        cb.combiners = pack(num_sectors, L,
                            [&](int first, int count)
                            {
                                std::vector<std::vector<bool>> sw(static_cast<std::size_t>(count), std::vector<bool>(static_cast<std::size_t>(subarrays), false));
                                CMatrix phases = CMatrix::Ones(M, count);
                                for (int l = 0; l < count; ++l)
                                {
                                    sw[static_cast<std::size_t>(l)][0] = true;
                                    phases.col(l) = steering_vector(geometry, cb.beam_centers_deg[static_cast<std::size_t>(first + l)]);
                                }
                                return hds_combiner(M, subarrays, sw, phases);
                            });
        return cb;
    }

    ScanCodebook build_fine_codebook(const ArrayGeometry &geometry, int L, double center_deg, double span_deg, double step_deg)
    {
        const int M = geometry.num_elements();
        if (L < 1 || L > M)
            throw ConfigError(fmt::format("fine codebook needs 1 <= L <= M, got L = {}", L));
        if (!(step_deg > 0.0) || !(span_deg >= 0.0))
            throw ConfigError(fmt::format("fine codebook needs step > 0 and span >= 0, got step {} span {}", step_deg, span_deg));
        const int count = static_cast<int>(std::lround(span_deg / step_deg)) + 1;

        ScanCodebook cb;
        cb.stage = ScanStage::fine;
        cb.active_elements = M;
        cb.beam_spacing_sin = 0.0;
        double prev_u = 0.0;
        for (int i = 0; i < count; ++i)
        {
            const double theta = center_deg - 0.5 * span_deg + i * step_deg;
            if (!(theta > -90.0 && theta < 90.0))
                throw DomainError(fmt::format("fine beam at {} deg lies outside (-90, 90)", theta));
            cb.beam_centers_deg.push_back(theta);
            const double u = std::sin(deg2rad(theta));
            if (i > 0)
                cb.beam_spacing_sin = std::max(cb.beam_spacing_sin, u - prev_u);
            prev_u = u;
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(M));
        cb.combiners = pack(count, L,
                            [&](int first, int n)
                            {
                                CMatrix w(M, n);
                                for (int l = 0; l < n; ++l)
                                    w.col(l) = scale * steering_vector(geometry, cb.beam_centers_deg[static_cast<std::size_t>(first + l)]);
                                return Combiner(std::move(w), FullyConnected{});
                            });
        return cb;
    }

    SimulatedSource::SimulatedSource(ArrayGeometry geometry, SourceScenario scenario, NoiseSpec noise, std::uint64_t seed, int max_slots)
        : geometry_(std::move(geometry)), scenario_(std::move(scenario)), noise_(noise), rng_(seed), max_slots_(max_slots)
    {
        if (max_slots < 0)
            throw ConfigError("slot budget must be non-negative");
    }

    SnapshotMatrix SimulatedSource::next_slot()
    {
        if (delivered_ >= max_slots_)
            throw ScanUnderrunError(fmt::format("snapshot source exhausted after {} slots", max_slots_));
        ++delivered_;
        const SignalBlock block = draw_signal_block(geometry_, scenario_, rng_);
        return antenna_snapshots(block, noise_, rng_);
    }

    ScanResult scan_power(const ScanCodebook &codebook, SnapshotSource &source, int slots_per_combiner, int num_selected)
    {
        if (slots_per_combiner < 1)
            throw ConfigError(fmt::format("slots per combiner must be positive, got {}", slots_per_combiner));
        ScanResult res;
        res.powers.assign(static_cast<std::size_t>(codebook.num_beams()), 0.0);
        int beam = 0;
        for (const auto &c : codebook.combiners)
        {
            for (int k = 0; k < slots_per_combiner; ++k)
            {
                const int slot = source.slots_delivered();
                const SnapshotMatrix y = apply_combiner(c, source.next_slot());
                ++res.slots_used;
                for (int l = 0; l < c.num_chains(); ++l)
                {
                    const double p = y.data.row(l).squaredNorm() / static_cast<double>(y.snapshots());
                    res.powers[static_cast<std::size_t>(beam + l)] += p / slots_per_combiner;
                    res.trace.push_back({slot, codebook.beam_centers_deg[static_cast<std::size_t>(beam + l)], p});
                }
            }
            beam += c.num_chains();
        }
        res.selected_sectors = top_indices(res.powers, num_selected);
        return res;
    }

    std::pair<double, double> fine_window(int sector, const CoarseConfig &coarse, const FineConfig &fine)
    {
        const double width = 2.0 / coarse.num_sectors;
        const double lo = -1.0 + width * sector - fine.overlap * width;
        const double hi = -1.0 + width * (sector + 1) + fine.overlap * width;
        return {sin_to_deg(lo), sin_to_deg(hi)};
    }

    int fine_beam_count(const ArrayGeometry &, const CoarseConfig &coarse, const FineConfig &fine)
    {
        if (!(fine.step_deg > 0.0) || fine.overlap < 0.0)
            throw ConfigError("fine scan needs step > 0 and overlap >= 0");
        double span = 0.0;
        for (int s = 0; s < coarse.num_sectors; ++s)
        {
            const auto [lo, hi] = fine_window(s, coarse, fine);
            span = std::max(span, hi - lo);
        }
        span = std::min(span, 180.0 - fine.step_deg);
        return static_cast<int>(std::ceil(span / fine.step_deg - 1e-9)) + 1;
    }

    int two_stage_slot_budget(const ArrayGeometry &geometry, int L, const CoarseConfig &coarse, const FineConfig &fine)
    {
        const int coarse_combiners = (coarse.num_sectors + L - 1) / L;
        const int fine_combiners = (fine_beam_count(geometry, coarse, fine) + L - 1) / L;
        return coarse_combiners * coarse.slots_per_combiner + coarse.num_selected * fine_combiners * fine.slots_per_combiner;
    }

    double pattern_fit(const std::vector<CVector> &beams, const std::vector<double> &powers, const ArrayGeometry &geometry,
                       double lo_deg, double hi_deg)
    {
        const double pnorm = std::sqrt(std::inner_product(powers.begin(), powers.end(), powers.begin(), 0.0));
        auto residual = [&](double theta)
        {
            const CVector a = steering_vector(geometry, theta);
            std::vector<double> g(beams.size());
            double gg = 0.0, pg = 0.0;
            for (std::size_t b = 0; b < beams.size(); ++b)
            {
                g[b] = std::norm(beams[b].dot(a));
                gg += g[b] * g[b];
                pg += powers[b] * g[b];
            }
            if (gg == 0.0)
                return 1.0;
            const double alpha = pg / gg;
            double r = 0.0;
            for (std::size_t b = 0; b < beams.size(); ++b)
            {
                const double e = (powers[b] - alpha * g[b]) / pnorm;
                r += e * e;
            }
            return r;
        };

        const int coarse_points = 400;
        const double h = (hi_deg - lo_deg) / coarse_points;
        double best = lo_deg, best_r = residual(lo_deg);
        for (int i = 1; i <= coarse_points; ++i)
        {
            const double t = lo_deg + i * h;
            const double r = residual(t);
            if (r < best_r)
            {
                best_r = r;
                best = t;
            }
        }
        // Golden-section search around the best sample.
        double a = std::max(lo_deg, best - h), b = std::min(hi_deg, best + h);
        const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
        double fc = residual(c), fd = residual(d);
        for (int it = 0; it < 200 && b - a > 1e-12; ++it)
        {
            if (fc < fd)
            {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = residual(c);
            }
            else
            {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = residual(d);
            }
        }
        const double x = 0.5 * (a + b);
        return residual(x) <= best_r ? x : best;
    }

    TwoStageResult two_stage_estimate(const ArrayGeometry &geometry, int L, SnapshotSource &source, const CoarseConfig &coarse,
                                      const FineConfig &fine)
    {
        if (coarse.num_selected < 1 || coarse.num_selected > coarse.num_sectors)
            throw ConfigError(fmt::format("selected sector count must be in [1, {}], got {}", coarse.num_sectors, coarse.num_selected));
        TwoStageResult out;
        const ScanCodebook coarse_cb = build_coarse_codebook(geometry, L, coarse.num_sectors);
        out.coarse = scan_power(coarse_cb, source, coarse.slots_per_combiner, coarse.num_selected);
        out.trace = out.coarse.trace;

        const int count = fine_beam_count(geometry, coarse, fine);
        const double span = (count - 1) * fine.step_deg;
        const double half_step = 0.5 * fine.step_deg;
        std::vector<std::pair<double, double>> found;
        for (int sector : out.coarse.selected_sectors)
        {
            const auto [lo, hi] = fine_window(sector, coarse, fine);
            double start = 0.5 * (lo + hi) - 0.5 * span;
            start = std::max(start, -90.0 + half_step);
            start = std::min(start, 90.0 - half_step - span);
            const ScanCodebook cb = build_fine_codebook(geometry, L, start + 0.5 * span, span, fine.step_deg);
            ScanResult res = scan_power(cb, source, fine.slots_per_combiner, 1);

            const int b = res.selected_sectors.front();
            const int b0 = std::max(b - 1, 0), b1 = std::min(b + 1, cb.num_beams() - 1);
            std::vector<CVector> beams;
            std::vector<double> powers;
            const double scale = 1.0 / std::sqrt(static_cast<double>(geometry.num_elements()));
            for (int i = b0; i <= b1; ++i)
            {
                beams.push_back(scale * steering_vector(geometry, cb.beam_centers_deg[static_cast<std::size_t>(i)]));
                powers.push_back(res.powers[static_cast<std::size_t>(i)]);
            }
            const double angle = b1 > b0 ? pattern_fit(beams, powers, geometry, cb.beam_centers_deg[static_cast<std::size_t>(b0)],
                                                       cb.beam_centers_deg[static_cast<std::size_t>(b1)])
                                         : cb.beam_centers_deg[static_cast<std::size_t>(b)];
            res.refined_angle_deg = angle;
            found.emplace_back(angle, res.powers[static_cast<std::size_t>(b)]);
            out.trace.insert(out.trace.end(), res.trace.begin(), res.trace.end());
            out.fine.push_back(std::move(res));
        }
        std::sort(found.begin(), found.end());
        for (const auto &[a, p] : found)
        {
            out.estimate.angles_deg.push_back(a);
            out.estimate.spectrum_peak_values.push_back(p);
        }
        out.estimate.method = Method::scan;
        out.slots_used = out.coarse.slots_used;
        for (const auto &f : out.fine)
            out.slots_used += f.slots_used;
        return out;
    }

    void write_scan_trace_csv(const std::string &path, const std::vector<ScanTraceRow> &trace)
    {
        std::ofstream os(path);
        if (!os)
            throw Error(fmt::format("cannot open '{}' for writing", path));
        os << "slot,beam_center_deg,power\n";
        for (const auto &r : trace)
            os << fmt::format("{},{:.17g},{:.17g}\n", r.slot, r.beam_center_deg, r.power);
        if (!os)
            throw Error(fmt::format("write to '{}' failed", path));
    }
}
