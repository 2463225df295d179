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

#include "hadoa/pilot.hpp"

#include <cmath>
#include <fmt/format.h>

namespace hadoa
{
    PilotSchedule::PilotSchedule(std::vector<cplx> pilot_symbols, std::uint64_t combiner_seed)
        : pilots_(std::move(pilot_symbols)), combiner_seed_(combiner_seed)
    {
        if (pilots_.empty())
            throw ConfigError("pilot schedule needs at least one slot");
        for (const cplx &p : pilots_)
            if (std::abs(std::abs(p) - 1.0) > 1e-12)
                throw ConfigError(fmt::format("pilot symbols must have unit modulus, got |p| = {}", std::abs(p)));
    }

    PilotSchedule PilotSchedule::random(int num_slots, std::uint64_t seed)
    {
        if (num_slots < 1)
            throw ConfigError(fmt::format("pilot schedule needs at least one slot, got {}", num_slots));
        Rng rng(derive_seed(seed, {0}));
        std::vector<cplx> p;
        for (int k = 0; k < num_slots; ++k)
            p.push_back(std::polar(1.0, 2.0 * pi * rng.uniform()));
        return PilotSchedule(std::move(p), derive_seed(seed, {1}));
    }

    Combiner PilotSchedule::combiner(int k, int M, int L) const
    {
        return random_phase_combiner(M, L, derive_seed(combiner_seed_, {static_cast<std::uint64_t>(k)}));
    }

    VirtualObservation collect_virtual_observation(const ArrayGeometry &geometry, const SourceScenario &scenario,
                                                   const NoiseSpec &noise, const std::vector<cplx> &pilots,
                                                   const std::vector<Combiner> &combiners, int frames_per_slot,
                                                   std::uint64_t seed)
    {
        const int M = geometry.num_elements();
        const int Kp = static_cast<int>(combiners.size());
        if (Kp < 1 || pilots.size() != combiners.size())
            throw ConfigError("virtual observation needs one combiner per pilot and at least one slot");
        if (frames_per_slot < 1)
            throw ConfigError(fmt::format("frames per slot must be positive, got {}", frames_per_slot));
        const int L = combiners.front().num_chains();
        for (const auto &c : combiners)
            if (c.num_antennas() != M || c.num_chains() != L)
                throw DimensionError("pilot combiners must all be M x L");

        const SourceScenario frames_scenario(scenario.angles_deg(), scenario.powers(), frames_per_slot);
        Rng rng(seed);
        const SignalBlock shared = draw_signal_block(geometry, frames_scenario, rng);

        VirtualObservation obs;
        obs.chains = L;
        obs.frames.resize(static_cast<Eigen::Index>(Kp) * L, frames_per_slot);
        obs.stacked.resize(static_cast<Eigen::Index>(Kp) * L, M);
        for (int k = 0; k < Kp; ++k)
        {
            const Combiner &w = combiners[static_cast<std::size_t>(k)];
            const cplx p = pilots[static_cast<std::size_t>(k)];
            const SignalBlock slot{shared.steering, p * shared.waveforms};
            const SnapshotMatrix x = antenna_snapshots(slot, noise, rng);
            obs.frames.middleRows(static_cast<Eigen::Index>(k) * L, L) = std::conj(p) * (w.matrix().adjoint() * x.data);
            obs.stacked.middleRows(static_cast<Eigen::Index>(k) * L, L) = w.matrix().adjoint();
        }
        obs.combiners = combiners;
        return obs;
    }

    VirtualObservation collect_virtual_observation(const ArrayGeometry &geometry, const SourceScenario &scenario,
                                                   const NoiseSpec &noise, const PilotSchedule &schedule, int L,
                                                   int frames_per_slot, std::uint64_t seed)
    {
        std::vector<Combiner> combiners;
        for (int k = 0; k < schedule.num_slots(); ++k)
            combiners.push_back(schedule.combiner(k, geometry.num_elements(), L));
        return collect_virtual_observation(geometry, scenario, noise, schedule.pilots(), combiners, frames_per_slot, seed);
    }

    VirtualObservation whiten(const VirtualObservation &obs)
    {
        VirtualObservation out = obs;
        const int L = obs.chains;
        for (std::size_t k = 0; k < obs.combiners.size(); ++k)
        {
            const CMatrix wh = whitening_matrix(obs.combiners[k]);
            const Eigen::Index r0 = static_cast<Eigen::Index>(k) * L;
            out.frames.middleRows(r0, L) = wh * obs.frames.middleRows(r0, L);
            out.stacked.middleRows(r0, L) = wh * obs.stacked.middleRows(r0, L);
        }
        return out;
    }

    DoaEstimate virtual_music(const VirtualObservation &obs, const ArrayGeometry &geometry, int K, const SpectrumGrid &grid,
                              bool allow_fallback)
    {
        if (K >= obs.dimension())
            throw DomainError(fmt::format("virtual MUSIC needs K < K_p * L = {}, got K = {}", obs.dimension(), K));
        if (obs.num_frames() < K + 1)
            throw DomainError(fmt::format("virtual MUSIC needs at least K + 1 = {} frames, got {}", K + 1, obs.num_frames()));
        if (obs.stacked.cols() != geometry.num_elements())
            throw DimensionError("virtual observation and geometry disagree on the antenna count");

        const VirtualObservation w = whiten(obs);
        SnapshotMatrix z{w.frames, Domain::rf_chain};
        const CovarianceMatrix r = sample_scm(z);
        const RVector p = music_spectrum(r.data(), K, w.stacked * *steering_table(geometry, grid));
        PeakOptions opt;
        opt.allow_fallback = allow_fallback;
        const Peaks peaks = find_peaks(p, grid, K, opt);
        DoaEstimate est;
        est.angles_deg = peaks.angles_deg;
        est.spectrum_peak_values = peaks.values;
        est.fallback = peaks.fallback;
        est.method = Method::pilot;
        return est;
    }

    DoaEstimate matched_filter_estimate(const VirtualObservation &obs, const ArrayGeometry &geometry, const SpectrumGrid &grid)
    {
        if (obs.stacked.cols() != geometry.num_elements())
            throw DimensionError("virtual observation and geometry disagree on the antenna count");
        const VirtualObservation w = whiten(obs);
        const CMatrix g = w.stacked * *steering_table(geometry, grid); // (K_p L) x P
        const CMatrix corr = g.adjoint() * w.frames;                  // P x frames
        RVector score(g.cols());
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            score(j) = corr.row(j).squaredNorm() / (g.col(j).squaredNorm() * w.num_frames());
        PeakOptions opt;
        opt.allow_fallback = true;
        const Peaks peaks = find_peaks(score, grid, 1, opt);
        DoaEstimate est;
        est.angles_deg = peaks.angles_deg;
        est.spectrum_peak_values = peaks.values;
        est.fallback = peaks.fallback;
        est.method = Method::pilot;
        return est;
    }
}
